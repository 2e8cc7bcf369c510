"""Formal elliptic-function series and the reduction of the first stratum.

The series P(u) = u^-2 + sum_{n>=2} c_n u^{2n-2} is represented as a
Laurent series in z with u = 1/z, i.e. degrees 2, -2, -4, ... and exact
coefficients that are polynomials in the moduli g2, g3.  The defining
property is the first-order equation P'^2 = 4P^3 - g2 P - g3; the
coefficients c_n are obtained by matching that equation order by order,
which pins c2 = g2/20, c3 = g3/28 and a quadratic recurrence for the rest.
"""

from __future__ import annotations

from .poly import Poly, Q
from .symbols import G2, G3, C_, H as Hsym
from .laurent import LaurentSeries
from . import strata


def du(series):
    """d/du acting on a series in z = 1/u: z^d -> -d * z^(d+1)."""
    return LaurentSeries(series.top + 1, series.depth - 1,
                         {d + 1: c * (-d) for d, c in series.coeffs.items()
                          if d != 0})


def wp_coeffs(N):
    """Coefficients c_2..c_N forced by the defining first-order equation.

    Returns a dict n -> Poly in {g2, g3}.  Each c_n is found by inserting
    an unknown into the series and solving the lowest nonvanishing
    coefficient of P'^2 - 4P^3 + g2 P + g3, which is linear in it.
    """
    if N < 2:
        raise ValueError("need N >= 2")
    g2 = Poly.var(G2)
    g3 = Poly.var(G3)
    coeffs = {}
    for m in range(2, N + 1):
        unknown = C_(m)
        series = _wp_series_raw(coeffs, extra={m: Poly.var(unknown)},
                                order=m)
        resid = _wp_defect(series, g2, g3)
        # the defect coefficient at u^(2m-6), i.e. z^(6-2m), is linear
        target = resid.coeff(6 - 2 * m)
        by = target.as_univar(unknown)
        a = by.get(1, Poly.zero()).as_const()
        rest = by.get(0, Poly.zero())
        if a == 0:
            raise AssertionError("c_%d not determined at its order" % m)
        coeffs[m] = rest * (-1 / a)
    return coeffs


def _wp_series_raw(coeffs, extra=None, order=None):
    terms = {2: Poly.const(1)}
    for n, c in coeffs.items():
        terms[2 - 2 * n] = c
    if extra:
        for n, c in extra.items():
            terms[2 - 2 * n] = c
    top_n = order if order is not None else max(coeffs, default=1)
    depth = 2 * top_n - 2
    return LaurentSeries(2, depth, terms)


def _wp_defect(p, g2, g3):
    dp = du(p)
    return dp * dp - (p * p * p).scale(4) + p.scale(g2) + LaurentSeries(
        0, p.depth, {0: g3})


class WpSeries:
    """The truncated series with its coefficient table."""

    def __init__(self, order):
        self.order = order
        self.coeffs = wp_coeffs(order)
        self.series = _wp_series_raw(self.coeffs)

    def check_defining_equation(self):
        g2, g3 = Poly.var(G2), Poly.var(G3)
        defect = _wp_defect(self.series, g2, g3)
        bad = [d for d, c in defect.coeffs.items()
               if d >= -defect.depth and not c.is_zero()]
        return sorted(bad)


def printed_recurrence(N):
    """The quadratic recurrence as printed, c_2 and c_3 as anchors.

    c_n = 1/((n-3)(2n+1)) * sum_{k=2}^{n-2} c_k c_{n-k} for n >= 4.
    Returned for comparison with the equation-forced coefficients; the two
    disagree from c_4 on (the printed prefactor is missing a 3).
    """
    out = {2: Poly.var(G2) * Q(1, 20), 3: Poly.var(G3) * Q(1, 28)}
    for n in range(4, N + 1):
        acc = Poly.zero()
        for k in range(2, n - 1):
            acc = acc + out[k] * out[n - k]
        out[n] = acc * Q(1, (n - 3) * (2 * n + 1))
    return out


def recurrence_comparison(N):
    """Compare equation-forced c_n against the printed recurrence.

    Returns a list of (n, matches, forced, printed)."""
    forced = wp_coeffs(N)
    printed = printed_recurrence(N)
    report = []
    for n in range(2, N + 1):
        report.append((n, forced[n] == printed[n], forced[n], printed[n]))
    return report


# -- the first-stratum reduction ----------------------------------------------

def reduced_basis_series(i, order):
    """Series for p_i under the reduction of the first stratum.

    p_2 = P, p_3 = -P'/2 and generally
      p_{n+2} = -(1/(n+1)!) d^n P           for odd n,
      p_{n+2} =  (1/(n+1)!) d^n P - c_{n/2+1}/(n+1)   for even n >= 2.
    """
    wp = WpSeries(order)
    return _reduced_series(wp, i)


def _reduced_series(wp, i):
    if i == 0:
        return LaurentSeries.one()
    if i == 2:
        return wp.series
    n = i - 2
    der = wp.series
    fact = 1
    for j in range(n):
        der = du(der)
        fact *= (j + 2)
    if n % 2 == 1:
        return der.scale(Q(-1, fact))
    shift = wp.coeffs[n // 2 + 1] * Q(1, n + 1)
    out = der.scale(Q(1, fact))
    return out - LaurentSeries(0, out.depth, {0: shift})


def reduction_substitution(max_i, max_k, order=None):
    """Map H^i_k -> Poly in {g2, g3} realizing the reduction.

    Built from the actual reduced series coefficients, so it is valid for
    every index in range; the basis shape (no constant term, no z-rung) is
    checked on the way.
    """
    if order is None:
        order = (max_i + max_k) // 2 + 3
    wp = WpSeries(order)
    subs = {}
    for i in range(2, max_i + 1):
        s = _reduced_series(wp, i)
        if not s.coeff(0).is_zero() or not s.coeff(1).is_zero():
            raise AssertionError("reduced p_%d violates the basis shape" % i)
        for k in range(-1, max_k + 1):
            if k == 0:
                continue
            subs[Hsym(i, k)] = s.coeff(-k)
    return subs


def wp_reduction_check(max_weight=8, depth=6):
    """Substitute the reduction into every closure constraint of the first
    stratum up to max_weight; returns a report of (provenance, ok, residual).
    """
    st = strata.parse_stratum("s1")
    cs = strata.closure_constraints(st, max_weight, depth=depth)
    max_i = max_weight
    max_k = max_weight + depth
    subs = reduction_substitution(max_i, max_k)
    report = []
    for eq, prov in zip(cs.equations, cs.provenance):
        res = eq.subs(subs)
        report.append((prov, res.is_zero(), res))
    return report


# -- classical identities -----------------------------------------------------

def classical_identities(N=12):
    """Verify the derivative identities and the two reduced curves as
    truncated-series identities; returns a list of (name, ok)."""
    if N < 10:
        raise ValueError("need N >= 10")
    wp = WpSeries(N)
    g2, g3 = Poly.var(G2), Poly.var(G3)
    p = wp.series
    d1 = du(p)
    d2 = du(d1)
    d3 = du(d2)
    d4 = du(d3)

    def const(poly, like):
        return LaurentSeries(0, like.depth, {0: poly})

    checks = []
    checks.append(("wp'^2 = 4wp^3 - g2 wp - g3",
                   d1 * d1 == (p * p * p).scale(4) - p.scale(g2)
                   - const(g3, p)))
    checks.append(("wp'' = 6wp^2 - g2/2",
                   d2 == (p * p).scale(6) - const(g2 * Q(1, 2), p)))
    checks.append(("wp''' = 12 wp wp'", d3 == (p * d1).scale(12)))
    checks.append(("wp'''' = 30wp'^2 + 12g2 wp + 18g3",
                   d4 == (d1 * d1).scale(30) + p.scale(g2 * 12)
                   + const(g3 * 18, p)))
    checks.append(("wp'''' = 20wp''wp - 8g2 wp - 12g3",
                   d4 == (d2 * p).scale(20) - p.scale(g2 * 8)
                   - const(g3 * 12, p)))
    # quintic curve: wp'''^2 - 576 wp^5 + 144 g2 wp^3 + 144 g3 wp^2 = 0
    p2 = p * p
    p3 = p2 * p
    checks.append(("wp'''^2 = 576wp^5 - 144g2 wp^3 - 144g3 wp^2",
                   d3 * d3 == (p3 * p2).scale(576) - p3.scale(g2 * 144)
                   - p2.scale(g3 * 144)))
    # trigonal curve: (wp'^2 + g3)^2 = (2/27)(wp'' - g2)^2 (wp'' + g2/2)
    lhs = d1 * d1 + const(g3, p)
    lhs = lhs * lhs
    f1 = d2 - const(g2, p)
    f2 = d2 + const(g2 * Q(1, 2), p)
    rhs = (f1 * f1 * f2).scale(Q(2, 27))
    checks.append(("(wp'^2 + g3)^2 = (2/27)(wp''-g2)^2(wp''+g2/2)",
                   lhs == rhs))
    return checks
