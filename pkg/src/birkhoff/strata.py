"""Stratum combinatorics and the multiplicative-closure machinery.

A stratum is described by the negative orders present in its order set S
and by the set of nonnegative "holes" missing from S.  The closed subset
spanned by the positive-order canonical basis elements is multiplicative
only when the series parameters H^i_k satisfy polynomial constraints; this
module generates those constraints from actual Laurent multiplication,
solves them triangularly, and provides the structure constants, dual sets
and the index bookkeeping.
"""

from __future__ import annotations

import itertools

from .poly import Poly, Q, GRLEX, elim_order, reduce_mod
from .symbols import H as Hsym, Symbol
from .laurent import LaurentSeries, make_basis_element, match_span, INF


class StratumSpec:
    __slots__ = ("name", "negatives", "holes", "family")

    def __init__(self, name, negatives, holes, family="general"):
        self.name = name
        self.negatives = tuple(sorted(negatives))
        self.holes = tuple(sorted(holes))
        self.family = family

    def __repr__(self):
        return "StratumSpec(%s)" % self.name

    def __eq__(self, other):
        return (isinstance(other, StratumSpec)
                and self.negatives == other.negatives
                and self.holes == other.holes
                and self.family == other.family)

    def __hash__(self):
        return hash((self.negatives, self.holes, self.family))

    def s_list(self, upto):
        """Canonical list s_0 < s_1 < ... of S up to the value upto."""
        out = list(self.negatives)
        out.extend(n for n in range(upto + 1) if n not in self.holes)
        return out

    def codim(self):
        """l(s) = sum_k (k - s_k)."""
        bound = max((0,) + self.holes) + len(self.negatives) + 1
        s = self.s_list(bound)
        return sum(k - sk for k, sk in enumerate(s))

    def codim_w(self):
        """Codimension of the closed subset: the number of holes."""
        return len(self.holes)

    def basis_orders(self, upto):
        """Nonnegative orders of canonical basis elements, ascending."""
        if self.family == "gr2":
            return [n for n in range(upto + 1) if n not in self.holes]
        return [n for n in range(upto + 1) if n not in self.holes]

    def positive_orders(self, upto):
        return [n for n in self.basis_orders(upto) if n >= 1]

    def min_positive_order(self):
        n = 1
        while n in self.holes:
            n += 1
        return n

    def to_json(self):
        return {"name": self.name, "negatives": list(self.negatives),
                "holes": list(self.holes), "family": self.family,
                "codim": self.codim()}


_BUILTINS = {
    "empty": ((), ()),
    "s0": ((-1,), (0,)),
    "s1": ((-1,), (1,)),
    "s12": ((-2, -1), (1, 2)),
    "s123": ((-3, -2, -1), (1, 2, 3)),
    "s2star": ((-1,), (2,)),
}


def parse_stratum(text):
    """Stratum grammar: empty | s0 | s1 | s12 | s123 | s2star | gr2:<2n>."""
    text = text.strip()
    if text in _BUILTINS:
        neg, holes = _BUILTINS[text]
        return StratumSpec(text, neg, holes)
    if text.startswith("gr2:"):
        m = int(text[4:])
        if m < 0 or m % 2:
            raise ValueError("gr2 stratum index must be even and >= 0: %r" % text)
        n = m // 2
        negatives = tuple(range(-m, 0, 2))
        holes = tuple(range(1, m, 2))
        return StratumSpec(text, negatives, holes, family="gr2")
    raise ValueError("unknown stratum spec %r" % text)


BUILTIN_NAMES = ("empty", "s0", "s1", "s12", "s123", "s2star",
                 "gr2:0", "gr2:2", "gr2:4", "gr2:6", "gr2:8", "gr2:10")


# -- structure constants ------------------------------------------------------

class StructureConstants:
    """Coefficients C^l_{jk} of p_j p_k = sum_l C^l_{jk} p_l."""

    def __init__(self, stratum):
        self.stratum = stratum
        self.entries = {}  # (j, k) -> {l: Poly}

    def get(self, j, k):
        key = (min(j, k), max(j, k))
        if key not in self.entries:
            self.entries[key] = structure_constants_closed(self.stratum, *key)
        return self.entries[key]

    def entry(self, j, k, l):
        return self.get(j, k).get(l, Poly.zero())


def _basis_coeff(st, n, d):
    """Exact z^d coefficient of the canonical basis element p_n, as a Poly.

    Valid for every d (the symbolic tail extends to -infinity).
    """
    if n == 0:
        return Poly.const(1) if d == 0 else Poly.zero()
    if st.family == "gr2":
        if n % 2 == 0:
            return Poly.const(1) if d == n else Poly.zero()
        if d == n:
            return Poly.const(1)
        if d % 2 == 0:
            return Poly.zero()
        if 0 <= d < n and d in st.holes:
            return Poly.var(Hsym(n, -d))
        if d < 0:
            return Poly.var(Hsym(n, -d))
        return Poly.zero()
    if d == n:
        return Poly.const(1)
    if 0 <= d < n:
        return Poly.var(Hsym(n, -d)) if d in st.holes else Poly.zero()
    if d < 0:
        return Poly.var(Hsym(n, -d))
    return Poly.zero()


def _product_coeff(st, j, k, d):
    """z^d coefficient of p_j p_k (exact for every d >= 0)."""
    out = Poly.zero()
    for a in range(d - k, j + 1):
        ca = _basis_coeff(st, j, a)
        if ca.is_zero():
            continue
        cb = _basis_coeff(st, k, d - a)
        if not cb.is_zero():
            out = out + ca * cb
    return out


def structure_constants_closed(st, j, k):
    """C^l_{jk} by direct coefficient matching on nonnegative degrees.

    Independent of the truncated-series engine: works on exact symbolic
    coefficients, solving the triangular system from the top degree down.
    """
    orders = [l for l in st.basis_orders(j + k) ]
    consts = {}
    for l in range(j + k, -1, -1):
        c = _product_coeff(st, j, k, l)
        for lp in orders:
            if lp > l and lp in consts:
                c = c - consts[lp] * _basis_coeff(st, lp, l)
        if l in st.holes or l < 0:
            continue
        if not c.is_zero():
            consts[l] = c
    return consts


def structure_constants_match(st, j, k, depth=2):
    """C^l_{jk} via Laurent multiplication and span matching."""
    raw = max(j, k) + depth
    pj = make_basis_element(st, j, raw)
    pk = make_basis_element(st, k, raw)
    prod = pj * pk
    need = max(int(prod.depth), 1) if prod.depth != INF else 1
    basis = [make_basis_element(st, l, need) for l in st.basis_orders(j + k)]
    consts, _ = match_span(prod, basis, holes=st.holes)
    return consts


def structure_constants(st, j, k):
    """Structure constants, cross-checked between the two derivations."""
    closed = structure_constants_closed(st, j, k)
    matched = structure_constants_match(st, j, k)
    if closed != matched:
        raise AssertionError(
            "structure-constant derivations disagree for %s (%d,%d)"
            % (st.name, j, k))
    sc = StructureConstants(st)
    sc.entries[(min(j, k), max(j, k))] = closed
    return sc


# -- closure constraints ------------------------------------------------------

class ConstraintSet:
    """Deduplicated closure constraints with provenance (j, k, degree)."""

    def __init__(self, stratum):
        self.stratum = stratum
        self.equations = []   # list of Poly, primitive with positive lead
        self.provenance = []  # list of (j, k, degree)
        self._seen = {}

    def add(self, poly, prov):
        if poly.is_zero():
            return
        norm = poly.primitive()
        if norm in self._seen:
            return
        self._seen[norm] = prov
        self.equations.append(norm)
        self.provenance.append(prov)

    def __len__(self):
        return len(self.equations)

    def __iter__(self):
        return iter(self.equations)

    def weight(self, i):
        j, k, d = self.provenance[i]
        return j + k - d

    def sorted_by_weight(self):
        idx = sorted(range(len(self.equations)),
                     key=lambda i: (self.weight(i), self.provenance[i]))
        return [(self.equations[i], self.provenance[i]) for i in idx]


def closure_constraints(st, max_weight, depth=None):
    """All residual constraints from products p_j p_k with j+k <= max_weight.

    depth bounds how far below z^0 each product is inspected; by default it
    is chosen so that every constraint of weight <= max_weight + 4 appears.
    """
    if max_weight < 2:
        raise ValueError("max_weight must be >= 2")
    cs = ConstraintSet(st)
    orders = st.positive_orders(max_weight)
    for j, k in itertools.combinations_with_replacement(orders, 2):
        if j + k > max_weight:
            continue
        if st.family == "gr2" and j % 2 == 0 and k % 2 == 0:
            continue  # exact powers of z^2, no content
        d = depth if depth is not None else j + k + 4
        for deg, poly in product_residuals(st, j, k, d):
            cs.add(poly, (j, k, deg))
    return cs


def product_residuals(st, j, k, depth):
    """Residuals of p_j p_k against the basis, down to degree -depth."""
    raw = depth + max(j, k)
    pj = make_basis_element(st, j, raw)
    pk = make_basis_element(st, k, raw)
    prod = (pj * pk).truncate(depth)
    need = max(int(prod.depth), 1) if prod.depth != INF else depth
    basis = [make_basis_element(st, l, need) for l in st.basis_orders(j + k)]
    _, residuals = match_span(prod, basis, holes=st.holes)
    return residuals


# -- triangular solving -------------------------------------------------------

class TriangularError(Exception):
    def __init__(self, stuck):
        self.stuck = stuck
        super().__init__("non-triangular system; stuck: %s"
                         % ", ".join(sorted(str(e) for e in stuck)))


def solve_triangular(cs, free):
    """Express every non-free H symbol in terms of the free ones.

    Constraints are processed in increasing weight; each must isolate some
    non-free symbol linearly with a rational coefficient.  Returns the
    substitution map; substituting it back into the constraints must give
    all zeros (checked).
    """
    free = set(free)
    items = cs.sorted_by_weight() if isinstance(cs, ConstraintSet) else [
        (p, (0, 0, 0)) for p in cs]
    pending = [p for p, _ in items]
    solution = {}
    progress = True
    while progress:
        progress = False
        remaining = []
        for eq in pending:
            cur = eq.subs(solution) if solution else eq
            if cur.is_zero():
                continue
            target = _pick_isolated(cur, free)
            if target is None:
                remaining.append(eq)
                continue
            s, coeff_poly, rest = target
            value = rest * (-1 / coeff_poly.as_const())
            solution[s] = value
            if solution:
                solution = {k: (v.subs({s: value}) if s in v.symbols() else v)
                            for k, v in solution.items()}
            progress = True
        pending = remaining
    stuck = []
    for eq in pending:
        cur = eq.subs(solution)
        if not cur.is_zero():
            stuck.extend(x for x in cur.symbols()
                         if x.cls == "H" and x not in free)
    if stuck:
        raise TriangularError(set(stuck))
    return solution


def _pick_isolated(poly, free):
    candidates = []
    for s in poly.symbols():
        if s.cls != "H" or s in free:
            continue
        if poly.degree_in(s) != 1:
            continue
        by = poly.as_univar(s)
        coeff = by.get(1)
        if coeff is None or not coeff.is_const():
            continue
        rest = by.get(0, Poly.zero())
        if s in rest.symbols():
            continue
        candidates.append((s.weight, s.srank, s, coeff, rest))
    if not candidates:
        return None
    candidates.sort(key=lambda t: (-t[0], t[1]))
    _, _, s, coeff, rest = candidates[0]
    return s, coeff, rest


def verify_associativity(st, index_max, solution=None, free=None):
    """Check sum_l C^l_jk C^p_lm = sum_l C^l_mk C^p_lj modulo closure.

    The residual for each (j,k,m,p) is reduced by substituting the solved
    triangular map (equivalently, reduction by the monic-linear relation
    polynomials); a pass means the residual vanishes identically.
    """
    if solution is None:
        weight = 2 * index_max + 2
        cs = closure_constraints(st, weight, depth=weight)
        if free is None:
            free = default_free_symbols(st, weight + 4)
        solution = solve_triangular(cs, free)
    sc = StructureConstants(st)
    orders = [n for n in st.positive_orders(index_max)]
    report = []
    for j, k, m in itertools.product(orders, repeat=3):
        lhs = {}
        for l, c in sc.get(j, k).items():
            for pdeg, c2 in sc.get(l, m).items():
                lhs[pdeg] = lhs.get(pdeg, Poly.zero()) + c * c2
        rhs = {}
        for l, c in sc.get(m, k).items():
            for pdeg, c2 in sc.get(l, j).items():
                rhs[pdeg] = rhs.get(pdeg, Poly.zero()) + c * c2
        ok = True
        worst = Poly.zero()
        for pdeg in set(lhs) | set(rhs):
            res = lhs.get(pdeg, Poly.zero()) - rhs.get(pdeg, Poly.zero())
            res = res.subs(solution)
            if not res.is_zero():
                ok = False
                worst = res
                break
        report.append(((j, k, m), ok, worst))
    return report


def default_free_symbols(st, weight_bound):
    """The free H parameters of the triangular solution for each stratum.

    Big cell: H^1_k.  First stratum: all H^2_k plus H^3_{-1}, H^3_1, H^3_3.
    Deeper strata: every H^i_k of the first three positive orders except
    those the constraints determine (discovered empirically and validated
    by solve_triangular itself).
    """
    name = st.name
    out = set()
    if name == "empty":
        for k in range(1, weight_bound):
            out.add(Hsym(1, k))
    elif name == "s0":
        for k in range(0, weight_bound):
            out.add(Hsym(1, k))
    elif name == "s1":
        out.add(Hsym(2, -1))
        for k in range(1, weight_bound):
            out.add(Hsym(2, k))
        out.update({Hsym(3, -1), Hsym(3, 1), Hsym(3, 3)})
    elif name in ("s12", "s2star"):
        for i in (3, 4, 5):
            for k in range(-2, weight_bound):
                if k != 0:
                    out.add(Hsym(i, k))
        if name == "s2star":
            out = {s for s in out if s.idx[1] != -1}
    elif name == "s123":
        for i in (4, 5, 6, 7):
            for k in range(-3, weight_bound):
                if k != 0:
                    out.add(Hsym(i, k))
    elif st.family == "gr2":
        n = len(st.holes)
        base = 2 * n + 1
        for k in range(-n, n + 1):
            out.add(Hsym(base, 2 * k + 1))
    else:
        raise ValueError("no default free set for %s" % name)
    return out


# -- duals and index ----------------------------------------------------------

def dual_full(negatives, holes):
    """S~ = {-n : n not in S} for S = (N minus holes) union negatives."""
    neg_out = tuple(sorted(-h for h in holes if h > 0))
    holes_out = []
    if 0 not in holes:
        holes_out.append(0)
    holes_out.extend(-n for n in negatives)
    return tuple(neg_out), tuple(sorted(holes_out))


def dual_set(st):
    """Dual of the closed subset: negatives are dropped first, because only
    positive-order elements enter the multiplicative machinery."""
    neg, holes = dual_full((), st.holes)
    return StratumSpec("dual(%s)" % st.name, neg, holes)


def dbar_index(st):
    """card(S_W - N) - card(S_W~ - N) for the closed subset W."""
    dual = dual_set(st)
    return 0 - len(dual.negatives)


# -- coordinate shift between s0 and the big cell -----------------------------

def shift_correspondence(max_weight=8):
    """Verify that shifting p_i by H^i_0 carries the order-zero-free
    stratum onto the big cell, and return the shift polynomials.

    Returns (shifts, report) where shifts maps i -> H^i_0 expressed in the
    free parameters H^1_k, and report lists the big-cell constraints that
    were checked to vanish under the correspondence.
    """
    s0 = parse_stratum("s0")
    cs = closure_constraints(s0, max_weight)
    free = default_free_symbols(s0, max_weight + 6)
    sol = solve_triangular(cs, free)
    shifts = {}
    for i in range(2, max_weight - 1):
        key = Hsym(i, 0)
        if key in sol:
            shifts[i] = sol[key]
    bigcell = parse_stratum("empty")
    bc_cs = closure_constraints(bigcell, max_weight)
    report = []
    for eq, prov in zip(bc_cs.equations, bc_cs.provenance):
        # identify H^1_k with the s0 parameters and push the solution in
        res = eq.subs(sol)
        report.append((prov, res.is_zero(), res))
    return shifts, report
