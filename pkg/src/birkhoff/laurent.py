"""Truncated formal Laurent series in z with polynomial coefficients.

A series stores exact coefficients for every degree in [-depth, top]; the
depth records how far down the tail can be trusted after truncated
multiplications.  depth may be INF for series that are exactly known
(polynomials in z, the constant 1, powers of lam).

Multiplying two series shrinks reliability: the product is exact at degree
m only when no dropped tail term can reach m, giving

    depth(a*b) = min(depth(a) - top(b), depth(b) - top(a)).
"""

from __future__ import annotations

from .poly import Poly, Q
from .symbols import H as Hsym

INF = float("inf")


class UnreliableDegree(Exception):
    """Requested a coefficient below the reliable window."""


class SpanMatchError(Exception):
    """A nonnegative degree outside holes could not be matched by the basis."""


class LaurentSeries:
    __slots__ = ("top", "depth", "coeffs")

    def __init__(self, top, depth, coeffs):
        self.top = top
        self.depth = depth
        self.coeffs = {d: c for d, c in coeffs.items() if not c.is_zero()}

    @staticmethod
    def zero(depth=INF):
        return LaurentSeries(0, depth, {})

    @staticmethod
    def one():
        return LaurentSeries(0, INF, {0: Poly.const(1)})

    @staticmethod
    def z_power(n):
        return LaurentSeries(n, INF, {n: Poly.const(1)})

    def is_exact(self):
        return self.depth == INF

    def coeff(self, m):
        if m < -self.depth:
            raise UnreliableDegree(
                "degree %d below reliable depth %s" % (m, self.depth))
        return self.coeffs.get(m, Poly.zero())

    def __add__(self, other):
        depth = min(self.depth, other.depth)
        top = max(self.top, other.top)
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            cur = out.get(d)
            out[d] = c if cur is None else cur + c
        out = {d: c for d, c in out.items() if d >= -depth}
        return LaurentSeries(top, depth, out)

    def __neg__(self):
        return LaurentSeries(self.top, self.depth,
                             {d: -c for d, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, poly):
        """Multiply every coefficient by a z-free polynomial."""
        if not isinstance(poly, Poly):
            poly = Poly.const(poly)
        if poly.is_zero():
            return LaurentSeries(self.top, self.depth, {})
        return LaurentSeries(self.top, self.depth,
                             {d: c * poly for d, c in self.coeffs.items()})

    def shift(self, n):
        """Multiply by z^n."""
        return LaurentSeries(self.top + n, self.depth - n,
                             {d + n: c for d, c in self.coeffs.items()})

    def __mul__(self, other):
        depth = min(self.depth - other.top, other.depth - self.top)
        top = self.top + other.top
        out = {}
        for da, ca in self.coeffs.items():
            for db, cb in other.coeffs.items():
                d = da + db
                if d < -depth:
                    continue
                v = out.get(d)
                prod = ca * cb
                out[d] = prod if v is None else v + prod
        return LaurentSeries(top, depth, out)

    def truncate(self, depth):
        """Restrict the reliable window (never extends it)."""
        depth = min(depth, self.depth)
        return LaurentSeries(self.top, depth,
                             {d: c for d, c in self.coeffs.items()
                              if d >= -depth})

    def subs(self, mapping):
        return LaurentSeries(self.top, self.depth,
                             {d: c.subs(mapping) for d, c in self.coeffs.items()})

    def support(self):
        return sorted(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        depth = min(self.depth, other.depth)
        for d in set(self.coeffs) | set(other.coeffs):
            if d < -depth:
                continue
            if self.coeffs.get(d, Poly.zero()) != other.coeffs.get(d, Poly.zero()):
                return False
        return True

    def __repr__(self):
        from .poly import plain_str
        parts = []
        for d in sorted(self.coeffs, reverse=True):
            parts.append("z^%d*(%s)" % (d, plain_str(self.coeffs[d])))
        return "Laurent[top=%s depth=%s: %s]" % (
            self.top, self.depth, " + ".join(parts) or "0")


def laurent_mul(a, b):
    return a * b


def coeff(a, m):
    return a.coeff(m)


def make_basis_element(stratum, i, depth):
    """Canonical basis element of order i with symbolic H coefficients.

    Shape: z^i, plus one rung H^i_{-h} z^h for each hole h below i, plus
    the tail sum H^i_k z^-k down to the requested depth.  The order-zero
    element is exactly 1.  In the z^2-invariant family the even elements
    are exact powers of z^2 and odd elements carry odd-index tails only.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if i < 0 or i in stratum.holes:
        raise ValueError("order %d is not available in stratum %s"
                         % (i, stratum.name))
    if i == 0:
        return LaurentSeries.one()
    if stratum.family == "gr2":
        if i % 2 == 0:
            return LaurentSeries.z_power(i)
        coeffs = {i: Poly.const(1)}
        for h in stratum.holes:
            if h < i:
                coeffs[h] = Poly.var(Hsym(i, -h))
        for k in range(1, depth + 1, 2):
            coeffs[-k] = Poly.var(Hsym(i, k))
        return LaurentSeries(i, depth, coeffs)
    coeffs = {i: Poly.const(1)}
    for h in stratum.holes:
        if h < i:
            coeffs[h] = Poly.var(Hsym(i, -h))
    for k in range(1, depth + 1):
        coeffs[-k] = Poly.var(Hsym(i, k))
    return LaurentSeries(i, depth, coeffs)


def match_span(prod, basis, holes=()):
    """Expand prod over the basis and collect the mismatch coefficients.

    Matching runs from the top degree down through all nonnegative degrees:
    a degree carried by a basis element determines its coefficient
    (triangular solve), a hole degree contributes a residual, and any other
    unmatched nonnegative degree is a structural error.  The reliable
    negative-degree coefficients of what remains are residuals as well.

    Returns (constants, residuals): constants maps basis order -> Poly,
    residuals is a list of (degree, Poly) with nonzero entries only.
    """
    by_order = {}
    for b in basis:
        if b.top in by_order:
            raise ValueError("duplicate basis order %d" % b.top)
        by_order[b.top] = b
    holes = set(holes)
    rest = prod
    constants = {}
    residuals = []
    for d in range(prod.top, -1, -1):
        c = rest.coeffs.get(d)
        if c is None or c.is_zero():
            continue
        b = by_order.get(d)
        if b is not None:
            constants[d] = c
            rest = rest - b.scale(c)
        elif d in holes:
            residuals.append((d, c))
            rest = rest - LaurentSeries.z_power(d).scale(c)
        else:
            raise SpanMatchError(
                "degree %d unmatched and not a hole (orders %s)"
                % (d, sorted(by_order)))
    if rest.depth == INF:
        for d in sorted((d for d in rest.coeffs if d < 0), reverse=True):
            c = rest.coeffs[d]
            if not c.is_zero():
                residuals.append((d, c))
    elif rest.depth >= 1:
        for d in range(-1, -int(rest.depth) - 1, -1):
            c = rest.coeffs.get(d)
            if c is not None and not c.is_zero():
                residuals.append((d, c))
    return constants, residuals
