"""Branch curve of the involution on a degree-1 del Pezzo surface.

Builds the degree-9 plane model F (Jacobian of u, v, w), the weighted-model
coefficients with F² = c0·w³ + c2(u,v)·w² + c4(u,v)·w + c6(u,v), and the
monic trigonal model W³ + a2(t)W² + a1(t)W + a0(t) over Q(t). The geometric
genus comes from Riemann-Hurwitz applied to the degree-3 map to the t-line,
with ramification extracted by exact Newton polygon recursion at every
branch closed point (rational or not) and at t = ∞.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .algebra import (
    NumberField,
    TriForm,
    UniPoly,
    jacobian_determinant,
    kernel_basis,
    monomials_of_degree,
    newton_polygon_slopes,
    resultant_in_w,
)
from .algebra.numutil import bivariate_is_irreducible, factor_rational_poly, rational_roots

INFINITE_PARAM = "inf"


class BranchCurveError(Exception):
    pass


@dataclass
class WeightedCoefficients:
    """c0 plus the binary forms c2, c4, c6 in (u, v); cm[j] multiplies
    u^(m-j) v^j."""

    c0: Fraction
    c2: tuple
    c4: tuple
    c6: tuple

    def dehomogenized(self, m):
        """c_m as a UniPoly in t = u/v."""
        coeffs = {2: self.c2, 4: self.c4, 6: self.c6}[m]
        return UniPoly(tuple(reversed(coeffs)))


@dataclass
class TrigonalModel:
    a2: UniPoly
    a1: UniPoly
    a0: UniPoly
    base_t: Fraction = Fraction(0)
    provenance: WeightedCoefficients | None = None
    singular_plane_model: TriForm | None = None
    # constant subtracted from c0*w/v^2 to put the triple root over t = 0
    # at the origin; 0 for imported models
    w_offset: Fraction = Fraction(0)

    def fibre_cubic(self, t0):
        """Monic cubic in W over Q at t = t0."""
        return UniPoly((self.a0(t0), self.a1(t0), self.a2(t0), Fraction(1)))

    def coefficient_list(self):
        """[a0, a1, a2, 1] as UniPolys in t, low to high in W."""
        return [self.a0, self.a1, self.a2, UniPoly((Fraction(1),))]

    def infinity_coefficients(self):
        """The model at t = ∞: substitute t = 1/s, W -> W/s², clear by s⁶.

        Returns [b0, b1, b2, 1] in the local parameter s.
        """
        b2 = self.a2.reversed_coeffs(2)
        b1 = self.a1.reversed_coeffs(4)
        b0 = self.a0.reversed_coeffs(6)
        return [b0, b1, b2, UniPoly((Fraction(1),))]

    def discriminant_t(self):
        """Discriminant of the fibre cubic as a UniPoly in t."""
        cubic = self.coefficient_list()
        deriv = [self.a1, self.a2.scale(Fraction(2)), UniPoly((Fraction(3),))]
        res = resultant_in_w(cubic, deriv)
        return -res  # disc = -Res(f, f') for monic cubic


def branch_curve(u, v, w):
    """F = det Jacobian(u, v, w): the degree-9 plane model of the branch
    curve, with multiplicity 3 at each base point."""
    f = jacobian_determinant(u, v, w)
    if not f:
        raise BranchCurveError("Jacobian vanishes: w depends on u, v")
    if f.degree != 9:
        raise BranchCurveError("branch model has degree %d, expected 9" % f.degree)
    return f


def multiplicity_at_least_three(form, point):
    """All second-order partials vanish at the point (so ord ≥ 3)."""
    for i in range(3):
        for j in range(i, 3):
            if form.partial(i).partial(j)(*point.coords):
                return False
    return True


def weighted_model_coefficients(u, v, w, f):
    """Solve F² = c0 w³ + c2(u,v) w² + c4(u,v) w + c6(u,v) exactly.

    The homogeneous system in (μ, c0, c2, c4, c6) on the degree-18 monomial
    space must have a one-dimensional kernel; it is normalized to μ = 1.
    """
    monoms = monomials_of_degree(18)
    w2 = w * w
    # column order: mu, c0, then cm_j (j the v-exponent) for m = 2, 4, 6
    columns = [f * f, w2 * w]
    upow = {}
    for m in (2, 4, 6):
        wfac = {2: w2, 4: w, 6: None}[m]
        for j in range(m + 1):
            term = _uv_power(u, v, m - j, j, upow)
            columns.append(term * wfac if wfac is not None else term)
    rows = []
    for i, mono in enumerate(monoms):
        row = [col.terms.get(mono, Fraction(0)) for col in columns]
        if any(row):
            rows.append(row)
    kern = kernel_basis(rows, len(columns))
    if len(kern) != 1:
        raise BranchCurveError(
            "weighted model system has kernel dimension %d, expected 1" % len(kern)
        )
    vec = kern[0]
    mu = vec[0]
    if not mu:
        raise BranchCurveError("weighted model system degenerate: μ = 0")
    # F² = (-1/μ) * Σ c, so fold the sign/scale into the c's
    scale = Fraction(-1) / mu
    c = [x * scale for x in vec[1:]]
    c0 = c[0]
    if not c0:
        raise BranchCurveError("leading weighted coefficient c0 vanishes")
    return WeightedCoefficients(c0, tuple(c[1:4]), tuple(c[4:9]), tuple(c[9:16]))


def _uv_power(u, v, i, j, cache):
    key = (i, j)
    if key not in cache:
        acc = TriForm({(0, 0, 0): Fraction(1)})
        for _ in range(i):
            acc = acc * u
        for _ in range(j):
            acc = acc * v
        cache[key] = acc
    return cache[key]


def trigonal_affine_model(coeffs, base_t=Fraction(0), plane_model=None):
    """Monic trigonal model from weighted coefficients: t = u/v and
    W = c0·w/v² - r, giving W³ + a2(t)W² + a1(t)W + a0(t) with t | a_j.

    The cuspidal generator u makes the fibre over t = 0 a single triple
    root r; translating W by r (a change of the complement w by a multiple
    of v²) puts it at the origin. A fibre without a triple root is an error.
    """
    if base_t != 0:
        raise BranchCurveError("pipeline models pin the ramified fibre at t = 0")
    c0 = coeffs.c0
    a2 = coeffs.dehomogenized(2)
    a1 = coeffs.dehomogenized(4).scale(c0)
    a0 = coeffs.dehomogenized(6).scale(c0 * c0)
    v2, v1, v0 = a2[0], a1[0], a0[0]
    if 3 * v1 != v2 * v2 or 27 * v0 != v2 ** 3:
        raise BranchCurveError("fibre at 0 not totally ramified")
    r = -v2 / 3
    if r:
        const = UniPoly.constant
        a0 = a0 + a1.scale(r) + a2.scale(r * r) + const(r ** 3)
        a1 = a1 + a2.scale(2 * r) + const(3 * r * r)
        a2 = a2 + const(3 * r)
    model = TrigonalModel(a2, a1, a0, Fraction(0), coeffs, plane_model, r)
    _validate_shape(model)
    for a in (model.a2, model.a1, model.a0):
        if a and a.coeffs[0]:
            raise BranchCurveError("fibre at 0 not totally ramified")
    return model


def model_from_coefficients(a2, a1, a0):
    """Import a monic trigonal model directly from its three coefficients.

    Unlike the pipeline constructor this does not insist on a totally
    ramified fibre at t = 0.
    """
    model = TrigonalModel(a2, a1, a0)
    _validate_shape(model)
    return model


def _validate_shape(model):
    if model.a2.degree > 2 or model.a1.degree > 4 or model.a0.degree > 6:
        raise BranchCurveError("coefficient degrees exceed (2, 4, 6)")
    if not model.discriminant_t():
        raise BranchCurveError("fibre cubic is not squarefree over Q(t)")
    if not bivariate_is_irreducible(model.coefficient_list()):
        raise BranchCurveError("trigonal model is reducible")


# ---------------------------------------------------------------------------
# ramification analysis


def _poly_subst_scaled_shift(coeff_list, lam, root, one):
    """P(s^lam * (Z + z0)) for P given by UniPoly-in-s coefficients.

    The root z0 lives in the coefficient field; the result is again a list
    of UniPoly-in-s coefficients, low to high in Z. No division happens, so
    the substituted polynomial is generally not monic; only its coefficient
    valuations matter downstream.
    """
    n = len(coeff_list) - 1
    zero = one - one
    out = [UniPoly() for _ in range(n + 1)]
    powers = [one]
    for _ in range(n):
        powers.append(powers[-1] * root)
    for i, p in enumerate(coeff_list):
        if not p:
            continue
        shifted = UniPoly((zero,) * (lam * i) + tuple(p.coeffs))
        for j in range(i + 1):
            out[j] = out[j] + shifted.scale(powers[i - j] * comb(i, j))
    return out


def _multiple_roots(r):
    """Multiple roots of a UniPoly of degree ≤ 3 over its coefficient field.

    Returns [(root, multiplicity)]; multiple roots of polynomials of degree
    at most 3 always lie in the coefficient field.
    """
    d = r.gcd(r.derivative())
    if not d or d.degree == 0:
        return []
    if d.degree == 1:
        return [(-d.coeffs[0] / d.coeffs[1], 2)]
    if d.degree == 2:
        dd = d.gcd(d.derivative())
        if dd.degree != 1:
            raise BranchCurveError("unexpected gcd structure in residual analysis")
        return [(-dd.coeffs[0] / dd.coeffs[1], 3)]
    raise BranchCurveError("residual degree too large")


def _ramification_at_point(coeff_list):
    """Σ (e_P - 1) over all places above s = 0 for a monic cubic in W with
    UniPoly-in-s coefficients over Q or a number field.

    Ramification sits over the multiple roots of the residual cubic mod s;
    shift each to the origin and read the Newton polygon there. Ramified
    places of a cubic over a local field have residue degree 1, so the sum
    needs no f-weights.
    """
    one = _field_one_of(coeff_list)
    residual = UniPoly(tuple(p[0] if p else one - one for p in coeff_list))
    total = 0
    for root, _mult in _multiple_roots(residual):
        total += _ramification_above(_poly_subst_scaled_shift(coeff_list, 0, root, one))
    return total


def _ramification_above(coeff_list, depth=0):
    """Σ (e_P - 1) over the places whose W-root has positive s-valuation.

    Only negative-slope Newton polygon segments matter here; roots of
    valuation ≤ 0 belong to other branches and are counted at their own
    shift (or are unramified).
    """
    if depth > 64:
        raise BranchCurveError("place recursion failed to terminate")
    pts = []
    for i, p in enumerate(coeff_list):
        if p:
            pts.append((i, Fraction(p.low_order())))
    one = _field_one_of(coeff_list)
    total = 0
    for slope, width in newton_polygon_slopes(pts):
        if slope >= 0:
            continue
        val = -slope
        e = val.denominator
        if e > 1:
            if width != e:
                raise BranchCurveError("unexpected wide fractional segment for a cubic")
            total += e - 1
            continue
        total += _integer_segment(coeff_list, pts, int(val), one, depth)
    return total


def _integer_segment(coeff_list, pts, lam, one, depth):
    """Residual polynomial of the slope -lam segment; recurse at each of its
    multiple roots (which capture all further ramification on this branch)."""
    zero = one - one
    vals = dict(pts)
    c = min(v + lam * i for i, v in vals.items())
    touching = sorted(i for i, v in vals.items() if v + lam * i == c)
    i0, i1 = touching[0], touching[-1]
    res_coeffs = []
    for i in range(i0, i1 + 1):
        p = coeff_list[i]
        need = int(c) - lam * i
        res_coeffs.append(p[need] if p and need >= 0 else zero)
    residual = UniPoly(tuple(res_coeffs))
    total = 0
    for root, _mult in _multiple_roots(residual):
        sub = _poly_subst_scaled_shift(coeff_list, lam, root, one)
        total += _ramification_above(sub, depth + 1)
    return total


def _field_one_of(coeff_list):
    for p in coeff_list:
        for cc in p.coeffs:
            if cc:
                return cc / cc
    return Fraction(1)


def _shift_to_closed_point(model, q):
    """Fibre cubic with t = τ + s over K = Q[τ]/(q), as UniPoly-in-s lists."""
    if q.degree == 1:
        tau = -q.coeffs[0]
        out = []
        for a in model.coefficient_list():
            out.append(a.shift(tau) if tau else a)
        return out
    field = NumberField(q)
    tau = field.generator()
    one = field.one()
    out = []
    for a in model.coefficient_list():
        lifted = UniPoly(tuple(field(c) for c in a.coeffs))
        out.append(lifted.compose(UniPoly((tau, one))))
    return out


def ramification_total(model):
    """Σ (e_P - 1)·[k(P) : Q] over all places of the trigonal curve, i.e.
    the degree of the ramification divisor of the map to the t-line."""
    disc = model.discriminant_t()
    if not disc:
        raise BranchCurveError("fibre cubic is not squarefree over Q(t)")
    total = 0
    _, factors = factor_rational_poly(disc)
    for q, _mult in factors:
        shifted = _shift_to_closed_point(model, q)
        total += q.degree * _ramification_at_point(shifted)
    total += _ramification_at_point(model.infinity_coefficients())
    return total


def geometric_genus(model):
    """Genus by Riemann-Hurwitz for the degree-3 cover of the t-line:
    2g - 2 = 3·(-2) + deg R."""
    deg_r = ramification_total(model)
    if (deg_r - 4) % 2:
        raise BranchCurveError("odd ramification total %d" % deg_r)
    return (deg_r - 4) // 2


def totally_ramified_fibres(model):
    """All t (possibly including 'inf') where the fibre cubic has a triple
    root: 3a1 = a2² and 27a0 = a2³ simultaneously."""
    a2, a1, a0 = model.a2, model.a1, model.a0
    cond_a = a1.scale(Fraction(3)) - a2 * a2
    cond_b = a0.scale(Fraction(27)) - a2 * a2 * a2
    out = []
    if cond_a and cond_b:
        g = cond_a.gcd(cond_b)
        candidates = [r for r, _ in rational_roots(g)] if g.degree >= 1 else []
    elif cond_a:
        candidates = [r for r, _ in rational_roots(cond_a)]
    elif cond_b:
        candidates = [r for r, _ in rational_roots(cond_b)]
    else:
        raise BranchCurveError("every fibre is triply ramified; model not squarefree")
    for t0 in candidates:
        if not cond_a(t0) and not cond_b(t0):
            out.append(t0)
    b0, b1, b2, _ = model.infinity_coefficients()
    v2, v1, v0 = b2[0], b1[0], b0[0]
    if 3 * v1 == v2 * v2 and 27 * v0 == v2 ** 3:
        out.append(INFINITE_PARAM)
    return out


def build_trigonal_model(dp):
    """Pipeline glue: branch curve and trigonal model from DelPezzoData."""
    f = branch_curve(dp.u, dp.v, dp.w)
    for p in dp.points:
        if not multiplicity_at_least_three(f, p):
            raise BranchCurveError("branch model lacks a triple point at %r" % (p,))
    coeffs = weighted_model_coefficients(dp.u, dp.v, dp.w, f)
    return trigonal_affine_model(coeffs, Fraction(0), f)
