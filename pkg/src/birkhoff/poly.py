"""Sparse exact multivariate polynomials over Q.

A monomial is a tuple of (Symbol, exponent) pairs sorted by symbol strength
(strongest first, no zero exponents); a Poly maps monomials to nonzero
rationals.  Everything is immutable in practice: operations return fresh
objects and never mutate their inputs, so values can be shared freely.

The canonical term order is graded lexicographic over the fixed symbol
order defined in symbols.py; reduction and elimination accept other orders
(lexicographic blocks) where the application needs them.
"""

from __future__ import annotations

import re
from functools import cmp_to_key

try:
    from gmpy2 import mpq as Q, mpz
except ImportError:  # pragma: no cover
    from fractions import Fraction as Q

    def mpz(x):
        return int(x)

from .symbols import Symbol, parse_symbol, latex_symbol, deriv

QONE = Q(1)
QZERO = Q(0)

MONO_ONE = ()


def q_str(q):
    q = Q(q)
    if q.denominator == 1:
        return str(q.numerator)
    return "%s/%s" % (q.numerator, q.denominator)


def q_parse(s):
    return Q(s)


# -- monomials ---------------------------------------------------------------

def mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        sa, ea = a[i]
        sb, eb = b[j]
        if sa is sb:
            out.append((sa, ea + eb))
            i += 1
            j += 1
        elif sa.srank < sb.srank:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_div(a, b):
    """a / b, or None when b does not divide a."""
    if not b:
        return a
    rem = dict(a)
    for s, e in b:
        have = rem.get(s, 0)
        if have < e:
            return None
        if have == e:
            del rem[s]
        else:
            rem[s] = have - e
    return tuple(sorted(rem.items(), key=lambda t: t[0].srank))


def mono_pow(a, n):
    return tuple((s, e * n) for s, e in a)


def mono_deg(a):
    return sum(e for _, e in a)


def mono_exp(a, sym):
    for s, e in a:
        if s is sym:
            return e
    return 0


def cmp_grlex(m1, m2):
    """Canonical order: graded, then lexicographic on the symbol sequence."""
    d1, d2 = mono_deg(m1), mono_deg(m2)
    if d1 != d2:
        return -1 if d1 < d2 else 1
    i = j = 0
    n1, n2 = len(m1), len(m2)
    while i < n1 and j < n2:
        s1, e1 = m1[i]
        s2, e2 = m2[j]
        if s1 is s2:
            if e1 != e2:
                return 1 if e1 > e2 else -1
            i += 1
            j += 1
        elif s1.srank < s2.srank:
            return 1  # m1 owns the stronger symbol
        else:
            return -1
    if i < n1:
        return 1
    if j < n2:
        return -1
    return 0


def elim_order(syms):
    """Order eliminating the given symbols first (block by block)."""
    syms = tuple(syms)

    def cmp(m1, m2):
        for s in syms:
            e1, e2 = mono_exp(m1, s), mono_exp(m2, s)
            if e1 != e2:
                return 1 if e1 > e2 else -1
        return cmp_grlex(m1, m2)

    return cmp


GRLEX = cmp_grlex


# -- Poly --------------------------------------------------------------------

class Poly:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        self.terms = terms if terms is not None else {}
        self._hash = None

    # construction
    @staticmethod
    def zero():
        return Poly({})

    @staticmethod
    def const(q):
        q = Q(q)
        return Poly({} if q == 0 else {MONO_ONE: q})

    @staticmethod
    def var(sym, exp=1, coeff=QONE):
        coeff = Q(coeff)
        if coeff == 0:
            return Poly({})
        return Poly({((sym, exp),): coeff})

    @staticmethod
    def monomial(mono, coeff=QONE):
        coeff = Q(coeff)
        return Poly({mono: coeff} if coeff != 0 else {})

    # predicates / views
    def is_zero(self):
        return not self.terms

    def is_const(self):
        return not self.terms or (len(self.terms) == 1 and MONO_ONE in self.terms)

    def as_const(self):
        if not self.terms:
            return QZERO
        if len(self.terms) == 1 and MONO_ONE in self.terms:
            return self.terms[MONO_ONE]
        raise ValueError("not a constant polynomial")

    def n_terms(self):
        return len(self.terms)

    def total_degree(self):
        return max((mono_deg(m) for m in self.terms), default=0)

    def degree_in(self, sym):
        return max((mono_exp(m, sym) for m in self.terms), default=0)

    def symbols(self):
        out = set()
        for m in self.terms:
            for s, _ in m:
                out.add(s)
        return out

    def coeff_of(self, mono):
        return self.terms.get(mono, QZERO)

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v == 0:
                    del out[m]
                else:
                    out[m] = v
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly.const(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            other = Q(other)
            if other == 0:
                return Poly({})
            if other == 1:
                return self
            return Poly({m: c * other for m, c in self.terms.items()})
        if not self.terms or not other.terms:
            return Poly({})
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = mono_mul(ma, mb)
                v = out.get(m)
                if v is None:
                    out[m] = ca * cb
                else:
                    v = v + ca * cb
                    if v == 0:
                        del out[m]
                    else:
                        out[m] = v
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Poly):
            try:
                return self.as_const() == Q(other)
            except (ValueError, TypeError):
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return "Poly(%s)" % plain_str(self)

    # calculus / substitution
    def diff(self, sym):
        """Formal partial derivative.

        For x-class symbols the derivative chains through field symbols:
        d(field)/dx_j becomes the corresponding d(...) symbol.
        """
        chain = sym.cls == "x"
        xj = sym.idx[0] if chain else None
        out = Poly({})
        for m, c in self.terms.items():
            for pos, (s, e) in enumerate(m):
                if s is sym:
                    rest = m[:pos] + ((s, e - 1),) if e > 1 else m[:pos]
                    rest = rest + m[pos + 1:]
                    out = out + Poly.monomial(rest, c * e)
                elif chain and (s.is_field or s.cls == "d"):
                    ds = deriv(s, (xj,)) if s.cls != "d" else Symbol(
                        "d", base=s.base, xs=s.xs + (xj,))
                    rest = m[:pos] + ((s, e - 1),) if e > 1 else m[:pos]
                    rest = rest + m[pos + 1:]
                    out = out + Poly.monomial(rest, c * e) * Poly.var(ds)
        return out

    def subs(self, mapping):
        """Simultaneous substitution of symbols by polynomials.

        The map must be acyclic on the symbols it actually touches
        (identity entries are ignored); a cyclic map is rejected.
        """
        mapping = {s: (v if isinstance(v, Poly) else Poly.const(v))
                   for s, v in mapping.items()}
        live = {s: v for s, v in mapping.items()
                if v.terms != {((s, 1),): QONE}}
        if not live:
            return self
        _check_acyclic(live)
        pow_cache = {}

        def sym_pow(s, e):
            key = (s, e)
            hit = pow_cache.get(key)
            if hit is None:
                base = live.get(s)
                hit = Poly.var(s, e) if base is None else base ** e
                pow_cache[key] = hit
            return hit

        out = Poly({})
        for m, c in self.terms.items():
            if not any(s in live for s, _ in m):
                out = out + Poly.monomial(m, c)
                continue
            acc = Poly.const(c)
            for s, e in m:
                acc = acc * sym_pow(s, e)
            out = out + acc
        return out

    # order-dependent views
    def leading(self, order=GRLEX):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        best = None
        for m in self.terms:
            if best is None or order(m, best) > 0:
                best = m
        return best, self.terms[best]

    def sorted_terms(self, order=GRLEX):
        return sorted(self.terms.items(),
                      key=cmp_to_key(lambda a, b: order(a[0], b[0])),
                      reverse=True)

    def content(self):
        """Positive rational content (gcd of numerators / lcm of denominators)."""
        if not self.terms:
            return QZERO
        num = 0
        den = 1
        for c in self.terms.values():
            num = _gcd(num, abs(c.numerator))
            den = _lcm(den, c.denominator)
        return Q(num, den)

    def primitive(self, order=GRLEX):
        """Divide by content and make the leading coefficient positive."""
        if not self.terms:
            return self
        cont = self.content()
        _, lead = self.leading(order)
        if lead < 0:
            cont = -cont
        return self * (1 / cont)

    def as_univar(self, sym):
        """Coefficients with respect to one symbol: degree -> Poly."""
        out = {}
        for m, c in self.terms.items():
            e = mono_exp(m, sym)
            rest = tuple(p for p in m if p[0] is not sym)
            bucket = out.setdefault(e, {})
            v = bucket.get(rest)
            bucket[rest] = c if v is None else v + c
        return {e: Poly({m: c for m, c in bucket.items() if c != 0})
                for e, bucket in out.items()
                if any(c != 0 for c in bucket.values())}


def _check_acyclic(live):
    # DFS over the dependency graph restricted to substituted symbols
    color = {}

    def visit(s):
        color[s] = 1
        for t in live[s].symbols():
            if t in live:
                st = color.get(t)
                if st == 1:
                    raise ValueError("cyclic substitution through %s" % t.key)
                if st is None:
                    visit(t)
        color[s] = 2

    for s in live:
        if color.get(s) is None:
            visit(s)


def _gcd(a, b):
    a, b = abs(int(a)), abs(int(b))
    while b:
        a, b = b, a % b
    return a


def _lcm(a, b):
    a, b = int(a), int(b)
    return a * b // _gcd(a, b)


def from_univar(sym, coeffs):
    out = Poly({})
    for e, c in coeffs.items():
        c = c if isinstance(c, Poly) else Poly.const(c)
        out = out + c * Poly.var(sym, e) if e else out + c
    return out


# -- division / reduction ----------------------------------------------------

def reduce_mod(f, gens, order=GRLEX):
    """Multivariate division: f = sum cofactor_i * gens_i + remainder.

    No remainder term is divisible by any generator leading term; the
    result is deterministic for a fixed order and generator sequence.
    """
    if not gens:
        raise ValueError("empty generator list")
    lts = []
    for g in gens:
        if g.is_zero():
            raise ValueError("zero generator")
        lts.append(g.leading(order))
    cofs = [Poly({}) for _ in gens]
    rem = Poly({})
    work = f
    while not work.is_zero():
        m, c = work.leading(order)
        hit = False
        for i, g in enumerate(gens):
            lm, lc = lts[i]
            q = mono_div(m, lm)
            if q is not None:
                t = Poly.monomial(q, c / lc)
                cofs[i] = cofs[i] + t
                work = work - t * g
                hit = True
                break
        if not hit:
            t = Poly.monomial(m, c)
            rem = rem + t
            work = work - t
    return cofs, rem


def exact_div(f, g):
    """f / g when g divides f exactly; raises otherwise."""
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if f.is_zero():
        return f
    (cof,), rem = reduce_mod(f, [g])
    if not rem.is_zero():
        raise ValueError("inexact polynomial division")
    return cof


# -- resultants --------------------------------------------------------------

def _univar_dense(f, sym):
    by_deg = f.as_univar(sym)
    n = max(by_deg, default=0)
    return [by_deg.get(i, Poly({})) for i in range(n + 1)]


def sylvester_matrix(f, g, sym):
    a = _univar_dense(f, sym)
    b = _univar_dense(g, sym)
    m, n = len(a) - 1, len(b) - 1
    if m < 1 or n < 1:
        raise ValueError("resultant requires positive degree in %s" % sym.key)
    size = m + n
    rows = []
    for i in range(n):
        row = [Poly({})] * size
        for j, c in enumerate(reversed(a)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [Poly({})] * size
        for j, c in enumerate(reversed(b)):
            row[i + j] = c
        rows.append(row)
    return rows


def bareiss_det(rows):
    """Fraction-free determinant of a square Poly matrix."""
    n = len(rows)
    m = [list(r) for r in rows]
    sign = 1
    prev = Poly.const(1)
    for k in range(n - 1):
        if m[k][k].is_zero():
            pivot_row = next((i for i in range(k + 1, n)
                              if not m[i][k].is_zero()), None)
            if pivot_row is None:
                return Poly({})
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = exact_div(num, prev)
            m[i][k] = Poly({})
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return -det if sign < 0 else det


def resultant(f, g, sym):
    """Classical resultant of f and g with respect to sym (exact, signed).

    Computed by the subresultant PRS to control coefficient growth; the
    result matches the Sylvester determinant including sign.
    """
    a = _univar_dense(f, sym)
    b = _univar_dense(g, sym)
    m, n = len(a) - 1, len(b) - 1
    if m < 1 or n < 1:
        raise ValueError("resultant requires positive degree in %s" % sym.key)
    if m < n:
        res = resultant(g, f, sym)
        return -res if (m * n) % 2 else res
    return _prs_resultant(a, b)


def _plc(coeffs):
    return coeffs[-1]


def _pdeg(coeffs):
    return len(coeffs) - 1


def _ptrim(coeffs):
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs


def _pseudo_rem(a, b):
    """lc(b)^(deg a - deg b + 1) * a  mod  b, densely in one variable."""
    a = list(a)
    db = _pdeg(b)
    lb = _plc(b)
    steps = _pdeg(a) - db + 1
    for _ in range(steps):
        da = _pdeg(a)
        if da < db:
            a = [c * lb for c in a]
            continue
        la = _plc(a)
        a = [c * lb for c in a[:-1]]
        for i in range(db):
            a[da - db + i] = a[da - db + i] - la * b[i]
        _ptrim(a)
        if not a:
            return []
    return a


def _prs_resultant(a, b):
    """Resultant via the subresultant PRS (deg a >= deg b >= 1)."""
    sign = 1
    g = Poly.const(1)
    h = Poly.const(1)
    while True:
        da, db = _pdeg(a), _pdeg(b)
        delta = da - db
        if (da % 2) and (db % 2):
            sign = -sign
        r = _pseudo_rem(a, b)
        _ptrim(r)
        if not r:
            return Poly({})
        denom = g * (h ** delta)
        r = [exact_div(c, denom) for c in r]
        a, b = b, r
        g = _plc(a)
        if delta == 0:
            h_new = h
        elif delta == 1:
            h_new = g
        else:
            h_new = exact_div(g ** delta, h ** (delta - 1))
        h = h_new
        if _pdeg(b) == 0:
            da = _pdeg(a)
            if da == 0:
                raise AssertionError("PRS lost both degrees")
            num = b[0] ** da
            if da == 1:
                res = num
            else:
                res = exact_div(num, h ** (da - 1))
            return -res if sign < 0 else res


# -- linear algebra over the coefficient field -------------------------------

def span_reduce(rows, vec):
    """Reduce vec against the row span of rows over the fraction field.

    rows and vec are dicts mapping a hashable 'column' to Poly entries.
    Returns the reduced vector (empty dict iff vec lies in the span).
    Fraction-free: multiplies through by pivots instead of dividing.
    """
    basis = []  # list of (pivot_col, row_dict)
    for r in rows:
        r = _vec_reduce(r, basis)
        if r:
            col = min(r)  # deterministic pivot choice
            basis.append((col, r))
    return _vec_reduce(vec, basis)


def _vec_normalize(r):
    num, den = 0, 1
    for v in r.values():
        for c in v.terms.values():
            num = _gcd(num, abs(c.numerator))
            den = _lcm(den, c.denominator)
    if num and not (num == 1 and den == 1):
        scale = Q(den, num)
        r = {k: v * scale for k, v in r.items()}
    return r


def _vec_reduce(r, basis):
    r = {k: v for k, v in r.items() if not v.is_zero()}
    for col, row in basis:
        if col in r:
            piv = row[col]
            fac = r[col]
            r = {k: v * piv for k, v in r.items()}
            for k, v in row.items():
                cur = r.get(k, Poly({})) - fac * v
                if cur.is_zero():
                    r.pop(k, None)
                else:
                    r[k] = cur
            r = _vec_normalize(r)
    return r


# -- text / serialization ----------------------------------------------------

def plain_str(p):
    """Deterministic plain-text form, canonical descending term order."""
    if p.is_zero():
        return "0"
    parts = []
    for m, c in p.sorted_terms():
        factors = []
        for s, e in m:
            factors.append(s.key if e == 1 else "%s^%d" % (s.key, e))
        body = "*".join(factors)
        ac = abs(c)
        if not body:
            piece = q_str(ac)
        elif ac == 1:
            piece = body
        else:
            piece = "%s*%s" % (q_str(ac), body)
        parts.append(("- " if c < 0 else "+ ") + piece)
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def latex_str(p):
    if p.is_zero():
        return "0"
    parts = []
    for m, c in p.sorted_terms():
        factors = []
        for s, e in m:
            ls = latex_symbol(s)
            factors.append(ls if e == 1 else "{%s}^{%d}" % (ls, e))
        body = "\\,".join(factors)
        ac = abs(c)
        if ac.denominator == 1:
            cs = "" if (ac == 1 and body) else str(ac.numerator)
        else:
            cs = "\\frac{%s}{%s}" % (ac.numerator, ac.denominator)
        piece = (cs + body) if body else (cs or "1")
        parts.append(("-" if c < 0 else "+") + piece)
    text = "".join(parts)
    return text[1:] if text.startswith("+") else text


def poly_to_json(p):
    terms = []
    for m, c in p.sorted_terms():
        terms.append({"c": q_str(c), "m": {s.key: e for s, e in m}})
    return {"terms": terms}


def poly_from_json(d):
    out = Poly({})
    for t in d["terms"]:
        mono = tuple(sorted(((parse_symbol(k), e) for k, e in t["m"].items()),
                            key=lambda pair: pair[0].srank))
        out = out + Poly.monomial(mono, q_parse(t["c"]))
    return out


_TOKEN = re.compile(r"""
    (?P<num>\d+(?:/\d+)?)
  | (?P<sym>[A-Za-z]+(?:\.-?\d+\.-?\d+|-?\d+)?(?:\([^)]*\))?)
  | (?P<op>\*\*|[-+*^()])
  | (?P<ws>\s+)
""", re.VERBOSE)


def parse_poly(text):
    """Parse a plain polynomial expression (the plain_str grammar plus
    parentheses), e.g. "3/2*H.2.1*H.2.-1 - p3^2"."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError("bad token at %r" % text[pos:pos + 20])
        pos = m.end()
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group()))
    tokens.append(("end", ""))
    idx = [0]

    def peek():
        return tokens[idx[0]]

    def take():
        tok = tokens[idx[0]]
        idx[0] += 1
        return tok

    def parse_atom():
        kind, val = take()
        if kind == "num":
            return Poly.const(q_parse(val))
        if kind == "sym":
            return Poly.var(parse_symbol(val))
        if kind == "op" and val == "(":
            e = parse_sum()
            kind, val = take()
            if val != ")":
                raise ValueError("expected )")
            return e
        if kind == "op" and val == "-":
            return -parse_atom()
        raise ValueError("unexpected token %r" % val)

    def parse_power():
        base = parse_atom()
        kind, val = peek()
        if kind == "op" and val in ("^", "**"):
            take()
            kind, val = take()
            if kind != "num":
                raise ValueError("exponent must be an integer")
            return base ** int(val)
        return base

    def parse_product():
        acc = parse_power()
        while True:
            kind, val = peek()
            if kind == "op" and val == "*":
                take()
                acc = acc * parse_power()
            elif kind in ("num", "sym") or (kind == "op" and val == "("):
                acc = acc * parse_power()  # implicit product
            else:
                return acc

    def parse_sum():
        kind, val = peek()
        neg = False
        if kind == "op" and val in ("+", "-"):
            take()
            neg = val == "-"
        acc = parse_product()
        if neg:
            acc = -acc
        while True:
            kind, val = peek()
            if kind == "op" and val in ("+", "-"):
                take()
                term = parse_product()
                acc = acc + (-term if val == "-" else term)
            else:
                return acc

    result = parse_sum()
    if peek()[0] != "end":
        raise ValueError("trailing input %r" % (peek(),))
    return result
