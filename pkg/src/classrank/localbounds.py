"""Local admissibility data for the descent over the parameter line.

Three ingredients per place: the candidate bad primes of the point
configuration, a contraction exponent lambda making every |h_i - 1| small
once (t, W) is lambda-close to the base point, and the radius ell pulling
the whole fibre over t into that lambda-box. Exponent conventions: a finite
place carries the integer k with |t|_p <= p^-k; the archimedean place
carries a rational radius.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd

from sympy import integer_nthroot

from .algebra import monomials_of_degree
from .algebra.linalg import det_bareiss
from .algebra.numutil import prime_divisors
from .algebra.padic import INF, root_valuations, valuation
from .branchcurve import INFINITE_PARAM


class BoundsError(Exception):
    pass


@dataclass
class SufficiencyTrace:
    """Verdict of the place-local check at (p, k), with the numbers that
    decided it: the polygon floor for root valuations and the minimal term
    valuation of each h_i - 1."""

    place: int
    exponent: int
    passed: bool
    lambda_exponent: int
    root_valuation: Fraction
    margins: tuple
    condition: str

    def verdict(self):
        return "PASS" if self.passed else "FAIL"


@dataclass
class AdmissibilityProfile:
    """Finite-place exponents k_p (|t|_p <= p^-k_p) for every bad prime,
    an archimedean radius (|t| < bound), and a per-place derivation log."""

    finite_places: dict
    archimedean_bound: Fraction
    provenance: dict

    def places(self):
        return sorted(self.finite_places)


# ---------------------------------------------------------------------------
# bad primes


def integral_representative(point):
    """Primitive integer coordinates of a rational projective point."""
    den = 1
    for c in point.coords:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in point.coords]
    g = 0
    for n in ints:
        g = gcd(g, n)
    return [n // g for n in ints]


def _mono_eval(coords, expo):
    out = 1
    for c, e in zip(coords, expo):
        out *= c ** e
    return out


def _eval_row(coords, monoms):
    return [_mono_eval(coords, e) for e in monoms]


def _partial_row(coords, monoms, var):
    row = []
    for e in monoms:
        if e[var] == 0:
            row.append(0)
            continue
        ne = list(e)
        ne[var] -= 1
        row.append(_mono_eval(coords, ne) * e[var])
    return row


def general_position_determinants(points):
    """The integer determinants whose simultaneous nonvanishing mod p says
    the reductions stay in general position: the 56 collinearity minors,
    the 28 conic minors, and the 8 singular-cubic determinants.

    With primitive representatives, a reduction failure mod p (including two
    points colliding, or a point degenerating) forces p to divide one of
    these. A zero determinant means the rational configuration itself is
    degenerate."""
    if len(points) != 8:
        raise BoundsError("expected 8 points")
    reps = [integral_representative(p) for p in points]
    dets = []
    for trip in combinations(range(8), 3):
        dets.append(det_bareiss([reps[i] for i in trip]))
    conic = monomials_of_degree(2)
    for six in combinations(range(8), 6):
        dets.append(det_bareiss([_eval_row(reps[i], conic) for i in six]))
    cubic = monomials_of_degree(3)
    for i in range(8):
        rows = [_eval_row(reps[j], cubic) for j in range(8) if j != i]
        rows += [_partial_row(reps[i], cubic, var) for var in range(3)]
        dets.append(det_bareiss(rows))
    if any(d == 0 for d in dets):
        raise BoundsError("points are not in general position over Q")
    return dets


def candidate_bad_primes(points, prime_bound=None):
    """Sorted primes where the curve can have bad reduction: {2, 3, 5} plus
    every prime divisor of a general-position determinant.

    The determinant factorizations cover every prime at once, so the result
    does not depend on prime_bound; the parameter is kept for callers that
    think in terms of a trial range."""
    primes = {2, 3, 5}
    for d in general_position_determinants(points):
        primes.update(prime_divisors(d))
    return sorted(primes)


# ---------------------------------------------------------------------------
# lambda: the contraction exponent of the h_i around the base point


def _require_normalized(h_list):
    hs = list(h_list)
    if not hs:
        raise BoundsError("empty function list")
    for h in hs:
        if h.delta != 1:
            raise BoundsError("kummer function not normalized to h(P0) = 1")
    return hs


def _target_exponent(p):
    # |h - 1|_2 <= |8|_2 makes h a local square at 2; odd p only needs < 1
    return 3 if p == 2 else 1


def lambda_at_place(h_list, p):
    """Contraction data at a place for normalized functions h = 1 + (h - 1).

    Finite p: the least integer m such that v_p(t), v_p(W) >= m forces
    v_p(h_i - 1) >= target for every i, via term-by-term valuations of
    h - 1 = alpha t^2 + beta t + gamma W. Infinite place: a rational radius
    r with |h_i - 1| <= 1/2 whenever |t|, |W| <= r."""
    hs = _require_normalized(h_list)
    if p == INFINITE_PARAM:
        worst = Fraction(0)
        for h in hs:
            worst = max(worst, abs(h.alpha) + abs(h.beta) + abs(h.gamma))
        if not worst:
            return Fraction(1)
        return min(Fraction(1), Fraction(1, 2) / worst)
    worst = 0
    for h in hs:
        vals = [valuation(c, p) for c in (h.alpha, h.beta, h.gamma) if c]
        if vals:
            worst = max(worst, max(0, -min(vals)))
    return _target_exponent(p) + int(worst)


# ---------------------------------------------------------------------------
# ell at finite places


def _fibre_polygon(model, p, k):
    """Root-valuation floor data of the fibre cubic over any t with
    v_p(t) >= k: Newton polygon of the termwise coefficient bounds
    L_j = min_c (v_p(a_{j,c}) + c k). Returns [(valuation, count)]
    decreasing; raising L_j only raises the polygon, so these are honest
    lower bounds for the true root valuations."""
    pts = [(3, Fraction(0))]
    for j, a in enumerate((model.a0, model.a1, model.a2)):
        low = None
        for c, coeff in enumerate(a.coeffs):
            if not coeff:
                continue
            v = valuation(coeff, p) + c * k
            low = v if low is None else min(low, v)
        if low is not None:
            pts.append((j, low))
    return root_valuations(pts)


def _root_valuation_floor(model, p, k):
    return _fibre_polygon(model, p, k)[-1][0]


def ell_at_finite_place(model, m, p):
    """The least verified exponent k >= m such that v_p(t) >= k forces every
    root of the fibre cubic to have valuation >= m.

    Closed form first: with a_j = t * abar_j and M_j the minimal coefficient
    valuation of abar_j, k = max(m, max_j (m (3 - j) - M_j)) puts every
    polygon point on or above the slope -m line. The polygon floor then
    certifies the returned value."""
    for a in (model.a0, model.a1, model.a2):
        if a(Fraction(0)):
            raise BoundsError("model is not totally ramified over t = 0")
    k = m
    for j, a in enumerate((model.a0, model.a1, model.a2)):
        bar = a.shifted_down(1)
        vals = [valuation(c, p) for c in bar.coeffs if c]
        if vals:
            k = max(k, int(m * (3 - j) - min(vals)))
    while _root_valuation_floor(model, p, k) < m:
        k += 1
    return k


def verify_sufficiency(model, h_list, p, k):
    """PASS iff v_p(t) >= k guarantees |h_i - 1|_p within the target at every
    point of the fibre: the polygon floor bounds v_p(W) from below, and each
    term of h_i - 1 is checked against the threshold (valuation > 0 at odd p,
    >= 3 at p = 2). Sharper than the lambda route (fractional root valuations
    count), so lambda-derived exponents always pass."""
    hs = _require_normalized(h_list)
    m = lambda_at_place(hs, p)
    rv = _root_valuation_floor(model, p, k)
    target = _target_exponent(p)
    margins = []
    ok = rv > 0
    for h in hs:
        terms = []
        if h.alpha:
            terms.append(valuation(h.alpha, p) + 2 * k)
        if h.beta:
            terms.append(valuation(h.beta, p) + k)
        if h.gamma:
            terms.append(valuation(h.gamma, p) + rv)
        margin = min(terms) if terms else INF
        margins.append((h.index, margin))
        if p == 2:
            ok = ok and margin >= target
        else:
            ok = ok and margin > 0
    condition = ">= 3" if p == 2 else "> 0"
    return SufficiencyTrace(p, k, ok, m, rv, tuple(margins), condition)


# ---------------------------------------------------------------------------
# ell at the archimedean place


def _nth_root_upper(x, e):
    """Rational upper bound for x^(1/e), x >= 0."""
    n, d = x.numerator, x.denominator
    root, exact = integer_nthroot(n * d ** (e - 1), e)
    if not exact:
        root += 1
    return Fraction(int(root), d)


def _root_magnitude_bound(model, radius):
    """|W| <= 2 max(|a2|, |a1|^(1/2), |a0|^(1/3)) over |t| <= radius, the
    Fujiwara bound with each |a_j| replaced by its absolute coefficient sum."""
    mags = []
    for e, a in ((3, model.a0), (2, model.a1), (1, model.a2)):
        total = Fraction(0)
        for c, coeff in enumerate(a.coeffs):
            total += abs(coeff) * radius ** c
        mags.append(_nth_root_upper(total, e))
    return 2 * max(mags)


def ell_at_infinity(model, h_list):
    """A rational radius L > 0 such that |t| <= L keeps every complex fibre
    root within the Fujiwara box and every |h_i - 1| < 1 there. Dyadic
    halving from 1; terminates because all the bounds vanish with L when the
    fibre over t = 0 is totally ramified."""
    hs = _require_normalized(h_list)
    radius = Fraction(1)
    for _ in range(256):
        r = _root_magnitude_bound(model, radius)
        if all(abs(h.alpha) * radius ** 2 + abs(h.beta) * radius
               + abs(h.gamma) * r < 1 for h in hs):
            return radius
        radius /= 2
    raise BoundsError("archimedean radius did not converge")


# ---------------------------------------------------------------------------
# full profile


def admissibility_profile(points, model, h_list, prime_bound=None):
    """Local data at every bad place: verified exponents k_p and the
    archimedean radius, capped at 1/2. Every emitted exponent re-passes
    verify_sufficiency; the provenance records the lambda exponent and the
    polygon used at each prime."""
    hs = _require_normalized(h_list)
    finite = {}
    provenance = {}
    for p in candidate_bad_primes(points, prime_bound):
        m = lambda_at_place(hs, p)
        k = ell_at_finite_place(model, m, p)
        trace = verify_sufficiency(model, hs, p, k)
        if not trace.passed:
            raise BoundsError("derived exponent failed verification at %d" % p)
        finite[p] = k
        provenance[p] = {"lambda": m, "polygon": tuple(_fibre_polygon(model, p, k))}
    raw = ell_at_infinity(model, hs)
    provenance[INFINITE_PARAM] = {"radius": raw}
    return AdmissibilityProfile(finite, min(raw, Fraction(1, 2)), provenance)
