"""Rational 2-torsion classes from the triple points of the branch nonic.

Each triple point P_i carries three curve branches; the degree-3 divisor
Theta_i of the points over P_i, against the fibre divisor over t = infinity,
gives a 2-torsion class T_i = [Theta_i - O]. The class is witnessed by a
function h_i = alpha*t^2 + beta*t + gamma*W + delta with divisor
2*Theta_i - 2*(infinity fibre); pairings against these h_i are the engine
of the rank bounds downstream.

All series arithmetic is exact: branch coefficients live in Q or in one
simple extension of degree <= 3 per branch orbit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .algebra import NumberField, UniPoly, kernel_basis, resultant_in_w
from .algebra.numutil import factor_rational_poly


class TorsionError(Exception):
    pass


@dataclass
class Branch:
    """One Galois orbit of branches at a triple point.

    The parameterization is (a, b) = (s, series(s)) in the translated
    affine chart, or swapped when the tangent direction is vertical.
    x_first says whether a is the chart's first coordinate.
    """

    minpoly: UniPoly | None
    field: NumberField | None
    series: UniPoly
    swapped: bool
    degree: int
    t_image: object = None
    w_image: object = None

    def one(self):
        return self.field.one() if self.field else Fraction(1)


@dataclass
class BranchExpansion:
    center: object
    chart: int
    branches: list
    precision: int


@dataclass
class ThetaDivisor:
    kind: str
    index: int | None = None
    cubic: UniPoly | None = None
    expansion: BranchExpansion | None = None


@dataclass
class KummerFunction:
    """h(t, W) = alpha t^2 + beta t + gamma W + delta, integer-primitive;
    normalization is h(P0) = delta at the base point P0 = (0, 0)."""

    index: int
    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    delta: Fraction

    @property
    def normalization(self):
        return self.delta

    def coefficients(self):
        return (self.alpha, self.beta, self.gamma, self.delta)

    def __call__(self, t, w):
        return (self.alpha * t + self.beta) * t + self.gamma * w + self.delta

    def normalized(self, t, w):
        return self(t, w) / self.delta

    def normalized_function(self):
        """The same function scaled so that h(P0) = 1 exactly."""
        if not self.delta:
            raise TorsionError("kummer function vanishes at the base point")
        d = self.delta
        return KummerFunction(self.index, self.alpha / d, self.beta / d,
                              self.gamma / d, Fraction(1))

    def w_poly(self, t_poly=None):
        """h as a degree-1 polynomial in W with UniPoly-in-t coefficients."""
        if t_poly is None:
            t_poly = UniPoly((Fraction(0), Fraction(1)))
        const = (t_poly * t_poly).scale(self.alpha) + t_poly.scale(self.beta) \
            + UniPoly.constant(self.delta)
        return [const, UniPoly.constant(self.gamma)]


# ---------------------------------------------------------------------------
# branch expansion


def _affine_at(form, point):
    """Bivariate dict (i, j) -> Fraction of the form translated so the point
    is the origin of the chart of its last nonzero coordinate."""
    coords = list(point.coords)
    chart = max(i for i, c in enumerate(coords) if c)
    others = [i for i in range(3) if i != chart]
    rows = [[Fraction(0)] * 3 for _ in range(3)]
    rows[others[0]][0] = Fraction(1)
    rows[others[1]][1] = Fraction(1)
    for i in range(3):
        rows[i][2] = coords[i]
    return form.substitute_linear(rows).dehomogenized(2), chart


def _lowest_degree(biv):
    return min(i + j for i, j in biv)


def _graded_part(biv, d):
    return {e: c for e, c in biv.items() if e[0] + e[1] == d}


def _swap(biv):
    return {(j, i): c for (i, j), c in biv.items()}


def _y_major(biv, fld=None):
    """biv as a list of UniPoly in a, indexed by the b-exponent."""
    ydeg = max(j for _, j in biv) if biv else 0
    cols = []
    for j in range(ydeg + 1):
        xs = {i: c for (i, jj), c in biv.items() if jj == j}
        if not xs:
            cols.append(UniPoly())
            continue
        top = max(xs)
        coeffs = [xs.get(i, Fraction(0)) for i in range(top + 1)]
        if fld is not None:
            coeffs = [fld(c) for c in coeffs]
        cols.append(UniPoly(tuple(coeffs)))
    return cols


def _mul_trunc(p, q, n):
    return (p.truncated(n) * q.truncated(n)).truncated(n)


def _eval_series(cols, series, n):
    """sum_j cols[j](a) * series(a)^j, truncated below a^n."""
    acc = cols[-1].truncated(n)
    for col in reversed(cols[:-1]):
        acc = _mul_trunc(acc, series, n) + col.truncated(n)
    return acc


def _lift_branch(biv, theta, fld, slope_derivative, precision):
    """Power series b = theta*a + ... with F(a, b(a)) = 0 through order
    precision + 1, by linear Hensel steps; the simple-root derivative of the
    tangent cone is the constant step multiplier."""
    one = fld.one() if fld else Fraction(1)
    cols = _y_major(biv, fld)
    series = UniPoly((one - one, theta * one))
    for k in range(2, precision + 1):
        residual = _eval_series(cols, series, k + 3)
        ck = -residual[k + 2] / slope_derivative
        series = series + UniPoly((one - one,) * k + (ck,))
    return series


def expand_branches(form, point, precision=12):
    """The three branches of the curve form = 0 at an ordinary triple point.

    Branches come in Galois orbits, one per irreducible factor of the
    tangent direction polynomial (plus a rational orbit for a vertical
    tangent); orbit degrees sum to 3.
    """
    biv, chart = _affine_at(form, point)
    if not biv or _lowest_degree(biv) != 3:
        raise TorsionError("wrong multiplicity at %r" % (point,))
    cone = _graded_part(biv, 3)
    slope = UniPoly(tuple(cone.get((3 - j, j), Fraction(0)) for j in range(4)))
    vertical = 3 - slope.degree
    if vertical >= 2:
        raise TorsionError("non-ordinary triple point at %r" % (point,))
    d = slope.gcd(slope.derivative())
    if d and d.degree > 0:
        raise TorsionError("non-ordinary triple point at %r" % (point,))
    branches = []
    _, factors = factor_rational_poly(slope)
    for q, mult in factors:
        if mult != 1:
            raise TorsionError("non-ordinary triple point at %r" % (point,))
        if q.degree == 1:
            fld, theta = None, -q.coeffs[0]
            deriv = slope.derivative()(theta)
        else:
            fld = NumberField(q)
            theta = fld.generator()
            deriv = UniPoly(tuple(fld(c) for c in slope.derivative().coeffs))(theta)
        series = _lift_branch(biv, theta, fld, deriv, precision)
        branches.append(Branch(q if q.degree > 1 else None, fld, series, False, q.degree))
    if vertical == 1:
        # swapped chart; the tangent there is b = 0, simple by the slope
        # degree check
        swapped = _swap(biv)
        s_slope = UniPoly(tuple(cone.get((i, 3 - i), Fraction(0)) for i in range(4)))
        deriv = s_slope.derivative()(Fraction(0))
        series = _lift_branch(swapped, Fraction(0), None, deriv, precision)
        branches.append(Branch(None, None, series, True, 1))
    if sum(b.degree for b in branches) != 3:
        raise TorsionError("branch degrees do not sum to 3 at %r" % (point,))
    return BranchExpansion(point, chart, branches, precision)


def branch_residual_order(expansion, form):
    """Smallest surviving order of form substituted along each branch (for
    the exactness invariant); None means no term survives the truncation."""
    biv, _ = _affine_at(form, expansion.center)
    out = []
    for b in expansion.branches:
        cols = _y_major(_swap(biv) if b.swapped else biv, b.field)
        r = _eval_series(cols, b.series, expansion.precision + 2)
        out.append(r.low_order())
    return out


def _series_along(expansion, branch, form):
    biv, _ = _affine_at(form, expansion.center)
    if branch.swapped:
        biv = _swap(biv)
    cols = _y_major(biv, branch.field)
    return _eval_series(cols, branch.series, expansion.precision + 2)


def fill_branch_images(expansion, u, v):
    """The t-coordinate (limit of u/v) of each branch. Both pencil members
    must vanish to order exactly 1 along every branch."""
    for b in expansion.branches:
        us = _series_along(expansion, b, u)
        vs = _series_along(expansion, b, v)
        if not vs or vs.low_order() != 1 or not us or us.low_order() != 1:
            raise TorsionError("pencil member vanishing order not 1 on a branch")
        b.t_image = us[1] / vs[1]
    return expansion


def fill_w_images(expansion, v, w, model):
    """The W-coordinate of each branch: limit of c0*w/v^2 - w_offset via
    the weighted-model provenance. Each resulting (t, W) must satisfy the
    model exactly; that ties the series data, the linear systems and the
    model together."""
    coeffs = model.provenance
    if coeffs is None:
        raise TorsionError("model lacks weighted-model provenance")
    for b in expansion.branches:
        vs = _series_along(expansion, b, v)
        ws = _series_along(expansion, b, w)
        if ws and ws.low_order() < 2:
            raise TorsionError("complement sextic does not vanish doubly on a branch")
        b.w_image = coeffs.c0 * ws[2] / (vs[1] * vs[1]) - model.w_offset
        res = _eval_model(model, b.t_image, b.w_image)
        if res:
            raise TorsionError("branch point is not on the trigonal model")
    return expansion


def _eval_model(model, t, w):
    acc = w * w * w
    for a, p in ((model.a2, 2), (model.a1, 1), (model.a0, 0)):
        val = a(t)
        term = val
        for _ in range(p):
            term = term * w
        acc = acc + term
    return acc


# ---------------------------------------------------------------------------
# theta divisors


def _norm_poly(value, fld):
    """Monic polynomial over Q whose roots are the conjugates of value."""
    if fld is None:
        return UniPoly((-value, Fraction(1)))
    return value.charpoly()


def image_cubic_from_values(values):
    """Monic cubic with the given (field, value, degree) root orbits."""
    acc = UniPoly((Fraction(1),))
    total = 0
    for fld, val, deg in values:
        acc = acc * _norm_poly(val, fld)
        total += deg
    if total != 3 or acc.degree != 3:
        raise TorsionError("theta image degree is not 3")
    return acc


def theta_image_cubic(expansion, u, v):
    """g_i: the monic rational cubic whose roots are the t-images of the
    three branches."""
    fill_branch_images(expansion, u, v)
    return image_cubic_from_values(
        [(b.field, b.t_image, b.degree) for b in expansion.branches])


def theta_divisors(dp, model, precision=4):
    """All eight odd theta divisors of the surface data plus the even one
    over t = infinity.

    The fibre images only read series terms up to order 3, and their
    correctness is certified by the exact on-model assertion rather than by
    truncation depth, so the default precision stays small; deeper
    expansions are available for the residual-vanishing invariant.
    """
    f = model.singular_plane_model
    if f is None:
        raise TorsionError("model lacks its singular plane model")
    out = []
    for i, p in enumerate(dp.points):
        exp = expand_branches(f, p, precision)
        cubic = theta_image_cubic(exp, dp.u, dp.v)
        fill_w_images(exp, dp.v, dp.w, model)
        out.append(ThetaDivisor("odd", i, cubic, exp))
    for i, th in enumerate(out):
        for other in out[i + 1:]:
            if th.cubic == other.cubic and _same_fibres(th, other):
                raise TorsionError("theta divisors %d and %d coincide"
                                   % (th.index, other.index))
    return out, ThetaDivisor("even")


def _same_fibres(a, b):
    wa = sorted(_norm_poly(x.w_image, x.field).coeffs for x in a.expansion.branches)
    wb = sorted(_norm_poly(x.w_image, x.field).coeffs for x in b.expansion.branches)
    return wa == wb


# ---------------------------------------------------------------------------
# Kummer functions


def _descend_rows(branch):
    """Rational rows expressing h(t, W) = 0 at the branch point, one row per
    power-basis coordinate of the orbit field."""
    t, w = branch.t_image, branch.w_image
    entries = [t * t, t, w, branch.one()]
    if branch.field is None:
        return [[Fraction(e) for e in entries]]
    n = branch.field.degree
    return [[e.coeffs[k] for e in entries] for k in range(n)]


def kummer_function(model, theta):
    """The function h with divisor 2*Theta_i - 2*(fibre over infinity).

    Vanishing at the three points of Theta_i cuts the 4-dimensional space
    span{t^2, t, W, 1} down to a line; the square-resultant identity
    Res_W(model, h) = c * g_i^2 is asserted on the result.
    """
    rows = []
    for b in theta.expansion.branches:
        rows.extend(_descend_rows(b))
    kern = kernel_basis(rows, 4)
    if len(kern) != 1:
        raise TorsionError("theta data inconsistent: solution space has "
                           "dimension %d" % len(kern))
    vec = _primitive(kern[0])
    h = KummerFunction(theta.index, *vec)
    if not h.delta:
        raise TorsionError("kummer function vanishes at the base point")
    res = resultant_in_w(model.coefficient_list(), h.w_poly())
    square = theta.cubic * theta.cubic
    c = res.lc() / square.lc() if res.degree == square.degree else None
    if c is None or not c or res != square.scale(c):
        raise TorsionError("resultant of h is not a square multiple of g^2")
    return h


def _primitive(vec):
    den = 1
    for c in vec:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in vec]
    g = 0
    for n in ints:
        g = gcd(g, n)
    ints = [n // g for n in ints]
    lead = next(n for n in ints if n)
    if lead < 0:
        ints = [-n for n in ints]
    return [Fraction(n) for n in ints]


# ---------------------------------------------------------------------------
# pairing


def pair(points, h):
    """Product of h over a formal sum of points: points is a list of
    (t, W, multiplicity) with coordinates in a common field (or rational).
    The value lands in that field; square-class reduction is the caller's
    concern."""
    acc = None
    for t, w, n in points:
        if not n:
            continue
        val = h(t, w)
        if not val:
            raise TorsionError("move the representative: support touches div h")
        if n < 0:
            val = 1 / val if isinstance(val, Fraction) else val.inverse()
            n = -n
        for _ in range(n):
            acc = val if acc is None else acc * val
    return Fraction(1) if acc is None else acc


def _theta_value(h, theta):
    """h evaluated on the degree-3 divisor Theta_j, a rational number."""
    acc = Fraction(1)
    for b in theta.expansion.branches:
        val = h(b.t_image, b.w_image)
        if not val:
            raise TorsionError("unmovable support collision between thetas")
        acc *= val if b.field is None else val.norm()
    return acc


def _fibre_value(h, model, q):
    """h evaluated on the full fibre divisor over t = q: the resultant of
    the (monic) fibre cubic with h(q, W) in W."""
    fibre = model.fibre_cubic(q)
    hq = UniPoly(((h.alpha * q + h.beta) * q + h.delta, h.gamma))
    out = fibre.resultant(hq)
    if not out:
        raise TorsionError("fibre over %s touches div h" % (q,))
    return out


def shift_parameters(cubics, count, start=1):
    """First `count` integers q >= start with every image cubic nonzero at
    q; deterministic by construction."""
    out = []
    q = start
    while len(out) < count:
        if all(c(Fraction(q)) for c in cubics):
            out.append(Fraction(q))
        q += 1
    return out


def weil_pairing_matrix(model, thetas, kummers):
    """8x8 matrix over F2 of the Weil pairing e(T_i, T_j).

    T_j is re-represented as Theta_j - (fibre over q_j) with h_j adjusted
    by (t - q_j)^-2, making supports disjoint; then
    e(T_i, T_j) = h_i(D_j) / h_j(D_i), a ratio that must land in {1, -1}.
    """
    n = len(thetas)
    qs = shift_parameters([th.cubic for th in thetas], n)
    bits = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            hi, hj = kummers[i], kummers[j]
            ti, tj = thetas[i], thetas[j]
            qi, qj = qs[i], qs[j]
            num = _theta_value(hi, tj) * _fibre_value(hj, model, qi) \
                * ti.cubic(qj) ** 2
            den = _theta_value(hj, ti) * _fibre_value(hi, model, qj) \
                * tj.cubic(qi) ** 2
            e = num / den
            if e == 1:
                bit = 0
            elif e == -1:
                bit = 1
            else:
                raise TorsionError("weil pairing value %s is not a sign" % (e,))
            bits[i][j] = bits[j][i] = bit
    return bits


def matrix_rank_f2(rows):
    mat = [list(r) for r in rows]
    rank = 0
    ncols = len(mat[0]) if mat else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        for r in range(len(mat)):
            if r != rank and mat[r][col]:
                mat[r] = [(a + b) % 2 for a, b in zip(mat[r], mat[rank])]
        rank += 1
    return rank


def torsion_basis_data(dp, model, precision=4):
    """Pipeline glue: thetas, kummer functions and the pairing matrix."""
    thetas, even = theta_divisors(dp, model, precision)
    kummers = [kummer_function(model, th) for th in thetas]
    matrix = weil_pairing_matrix(model, thetas, kummers)
    return thetas, even, kummers, matrix
