"""Structured symbols for the exact polynomial core.

Every quantity in the library is a sparse polynomial over the rationals in
a fixed vocabulary of symbols: the formal variable z and its square lam,
affine coordinates p_i and the dual coordinates ps_i, series parameters
H.i.k, dependent/independent variables u_k and x_k, series coefficients
c_n, elliptic moduli g2/g3, tangent components D.j.k, tangent images pi_i,
curve-coefficient fields mu_i and v_i, potentials U, V, F and w, Schur
arguments t_n, and the blow-up coordinates k2, k3, kt.  Formal derivatives
of field symbols are symbols themselves, written d(base;x_i,...) with the
x-indices kept as a sorted multiset (mixed partials commute).
"""

from __future__ import annotations

import re

# class tag -> (arity, rank used by the canonical term order)
_CLASSES = {
    "p": (1, 0),
    "ps": (1, 1),
    "z": (0, 2),
    "lam": (0, 3),
    "k": (1, 4),
    "kt": (0, 5),
    "H": (2, 6),
    "D": (2, 7),
    "pi": (1, 8),
    "t": (1, 9),
    "c": (1, 10),
    "g2": (0, 11),
    "g3": (0, 12),
    "u": (1, 13),
    "mu": (1, 14),
    "v": (1, 15),
    "U": (0, 16),
    "V": (0, 17),
    "F": (0, 18),
    "w": (0, 19),
    "x": (1, 20),
    "d": (None, 21),
}

# classes that depend on the x_k and therefore differentiate to d(...) symbols
FIELD_CLASSES = frozenset({"u", "mu", "v", "U", "V", "F", "H", "w"})

_interned: dict = {}


class Symbol:
    """An interned, immutable symbol.  Compare/hash by identity."""

    __slots__ = ("cls", "idx", "base", "xs", "key", "srank", "_hash")

    def __new__(cls, tag, idx=(), base=None, xs=()):
        key = _make_key(tag, idx, base, xs)
        hit = _interned.get(key)
        if hit is not None:
            return hit
        self = object.__new__(cls)
        self.cls = tag
        self.idx = tuple(idx)
        self.base = base
        self.xs = tuple(sorted(xs))
        self.key = key
        self.srank = _make_srank(tag, self.idx, base, self.xs)
        self._hash = hash(key)
        _interned[key] = self
        return self

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return self.key

    @property
    def is_field(self):
        return self.cls in FIELD_CLASSES

    @property
    def weight(self):
        """Grading weight: wt(p_i)=i, wt(H^i_k)=i+k, wt(u_k)=k+1."""
        if self.cls in ("p", "ps"):
            return self.idx[0]
        if self.cls in ("H", "D"):
            return self.idx[0] + self.idx[1]
        if self.cls == "u":
            return self.idx[0] + 1
        return None


def _make_key(tag, idx, base, xs):
    if tag == "d":
        return "d(%s;%s)" % (base.key, ",".join("x%d" % j for j in sorted(xs)))
    if tag == "H":
        return "H.%d.%d" % tuple(idx)
    if tag == "D":
        return "D.%d.%d" % tuple(idx)
    arity = _CLASSES[tag][0]
    if arity == 0:
        return tag
    return "%s%d" % (tag, idx[0])


def _make_srank(tag, idx, base, xs):
    rank = _CLASSES[tag][1]
    if tag == "d":
        return (rank,) + base.srank + xs
    if tag in ("p", "ps", "k"):
        # higher index is stronger in the canonical order
        return (rank, -idx[0])
    return (rank,) + idx


# -- constructors ------------------------------------------------------------

def P(i):
    if i < 0:
        raise ValueError("p index must be nonnegative: %d" % i)
    return Symbol("p", (i,))


def PS(i):
    return Symbol("ps", (i,))


def H(i, k):
    if i < 0 or k < -i:
        raise ValueError("illegal H index (%d,%d)" % (i, k))
    return Symbol("H", (i, k))


def DL(j, k):
    return Symbol("D", (j, k))


def U_(k):
    return Symbol("u", (k,))


def X(k):
    return Symbol("x", (k,))


def C_(n):
    return Symbol("c", (n,))


def T_(n):
    return Symbol("t", (n,))


def PI(i):
    return Symbol("pi", (i,))


def MU(i):
    return Symbol("mu", (i,))


def VF(i):
    return Symbol("v", (i,))


def K(i):
    return Symbol("k", (i,))


Z = Symbol("z")
LAM = Symbol("lam")
G2 = Symbol("g2")
G3 = Symbol("g3")
UF = Symbol("U")
VFLD = Symbol("V")
FTAU = Symbol("F")
WAUX = Symbol("w")
KT = Symbol("kt")


def deriv(base, xs):
    """d^n base / dx_{j1}...dx_{jn}; collapses nested derivatives."""
    if base.cls == "d":
        return Symbol("d", base=base.base, xs=base.xs + tuple(xs))
    if not base.is_field:
        raise ValueError("cannot differentiate non-field symbol %s" % base.key)
    return Symbol("d", base=base, xs=tuple(xs))


_SIMPLE = re.compile(r"^([A-Za-z]+?)(-?\d+)$")


def parse_symbol(key):
    """Inverse of Symbol.key."""
    if key in ("z", "lam", "g2", "g3", "U", "V", "F", "w", "kt"):
        return Symbol(key)
    if key.startswith("d(") and key.endswith(")"):
        inner = key[2:-1]
        base_key, _, rest = inner.partition(";")
        xs = []
        if rest:
            for part in rest.split(","):
                if not part.startswith("x"):
                    raise ValueError("bad derivative index %r in %r" % (part, key))
                xs.append(int(part[1:]))
        return deriv(parse_symbol(base_key), xs)
    if key.startswith("H.") or key.startswith("D."):
        tag, i, k = key.split(".")
        return Symbol(tag, (int(i), int(k)))
    m = _SIMPLE.match(key)
    if m and m.group(1) in _CLASSES and _CLASSES[m.group(1)][0] == 1:
        return Symbol(m.group(1), (int(m.group(2)),))
    raise ValueError("unparseable symbol key %r" % key)


def latex_symbol(s):
    """LaTeX form following the H^i_k / p_i conventions."""
    if s.cls == "p":
        return "p_{%d}" % s.idx
    if s.cls == "ps":
        return "p^*_{%d}" % s.idx
    if s.cls == "H":
        return "H^{%d}_{%d}" % s.idx
    if s.cls == "D":
        return "\\Delta_{%d\\,%d}" % s.idx
    if s.cls == "z":
        return "z"
    if s.cls == "lam":
        return "\\lambda"
    if s.cls == "g2":
        return "g_2"
    if s.cls == "g3":
        return "g_3"
    if s.cls == "kt":
        return "\\tilde{k}"
    if s.cls == "pi":
        return "\\pi_{%d}" % s.idx
    if s.cls == "mu":
        return "\\mu_{%d}" % s.idx
    if s.cls == "d":
        n = len(s.xs)
        dens = "".join("\\partial x_{%d}" % j for j in s.xs)
        num = "\\partial" if n == 1 else "\\partial^{%d}" % n
        return "\\frac{%s %s}{%s}" % (num, latex_symbol(s.base), dens)
    if s.cls in ("u", "v", "x", "c", "t", "k"):
        return "%s_{%d}" % (s.cls, s.idx[0])
    return s.key
