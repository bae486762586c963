"""Del Pezzo input data: general position of 8 points in P², the cubic and
sextic linear systems through them, singular members of the cubic pencil,
and the ninth base point.

Everything is exact. Points may have Fraction coordinates or live in a
number field (general-position checks only, in the latter case).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    TriForm,
    UniPoly,
    det,
    kernel_basis,
    monomials_of_degree,
    resultant_in_w,
    rref,
    solve_linear_system,
)
from .algebra.numutil import factor_rational_poly, rational_roots


class DelPezzoError(Exception):
    pass


class GeneralPositionError(DelPezzoError):
    def __init__(self, report):
        self.report = report
        super().__init__("points are not in general position: %s" % (report.failures[:1],))


class DegeneratePencilError(DelPezzoError):
    pass


class ProjPoint:
    """Point of P² with exact coordinates, stored with the last nonzero
    coordinate scaled to 1."""

    __slots__ = ("coords",)

    def __init__(self, a, b, c):
        coords = [a, b, c]
        last = None
        for i in (2, 1, 0):
            if coords[i]:
                last = i
                break
        if last is None:
            raise ValueError("(0 : 0 : 0) is not a projective point")
        inv = coords[last]
        normalized = []
        for v in coords:
            normalized.append(v / inv if v else v - v)
        self.coords = tuple(normalized)

    @staticmethod
    def of_fractions(a, b, c):
        return ProjPoint(Fraction(a), Fraction(b), Fraction(c))

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return "(%s : %s : %s)" % self.coords


@dataclass
class GeneralPositionReport:
    passed: bool
    failures: list  # (kind, index tuple); kinds: coincident, collinear, conic, singular_cubic

    @property
    def witness(self):
        return self.failures[0] if self.failures else None


@dataclass
class DelPezzoData:
    points: list
    u: TriForm
    v: TriForm
    w: TriForm
    base_point_O: ProjPoint
    cusp: ProjPoint


def _field_one(points):
    for p in points:
        for c in p.coords:
            if c:
                return c / c
    raise ValueError("no nonzero coordinate")


def _mono_eval(coords, expo, one):
    acc = one
    for c, e in zip(coords, expo):
        for _ in range(e):
            acc = acc * c
    return acc


def _eval_row(point, monoms, one):
    return [_mono_eval(point.coords, e, one) for e in monoms]


def _partial_row(point, monoms, var, one):
    row = []
    for e in monoms:
        if e[var] == 0:
            row.append(one - one)
            continue
        ne = list(e)
        ne[var] -= 1
        row.append(_mono_eval(point.coords, ne, one) * e[var])
    return row


def check_general_position(points, over=None):
    """General-position verdict for 8 points of P²: pairwise distinct, no 3
    collinear, no 6 on a conic, and no cubic through all 8 that is singular
    at one of them. Returns a report listing every violated condition with
    the offending index tuple."""
    if len(points) != 8:
        raise ValueError("expected 8 points")
    one = _field_one(points)
    failures = []

    for i in range(8):
        for j in range(i + 1, 8):
            if points[i] == points[j]:
                failures.append(("coincident", (i, j)))
    if failures:
        return GeneralPositionReport(False, failures)

    from itertools import combinations

    for trip in combinations(range(8), 3):
        rows = [list(points[i].coords) for i in trip]
        if not det(rows, one):
            failures.append(("collinear", trip))

    conic_monoms = monomials_of_degree(2)
    for six in combinations(range(8), 6):
        rows = [_eval_row(points[i], conic_monoms, one) for i in six]
        if not det(rows, one):
            failures.append(("conic", six))

    cubic_monoms = monomials_of_degree(3)
    for i in range(8):
        rows = [_eval_row(points[j], cubic_monoms, one) for j in range(8) if j != i]
        for var in range(3):
            rows.append(_partial_row(points[i], cubic_monoms, var, one))
        if not det(rows, one):
            failures.append(("singular_cubic", (i,)))

    return GeneralPositionReport(not failures, failures)


def _echelon_forms(kernel_vecs, ncols, degree):
    red, _ = rref(kernel_vecs, ncols)
    return [TriForm.from_coefficient_vector(v, degree) for v in red]


def anticanonical_cubics(points):
    """Reduced-echelon basis (graded-lex monomial order) of the cubics
    vanishing at the 8 points. Exactly 2-dimensional for general position."""
    monoms = monomials_of_degree(3)
    one = _field_one(points)
    rows = [_eval_row(p, monoms, one) for p in points]
    kern = kernel_basis(rows, len(monoms), one)
    if len(kern) != 2:
        raise DelPezzoError("cubic system has dimension %d, expected 2" % len(kern))
    return _echelon_forms(kern, len(monoms), 3)


def bianticanonical_sextics(points, u, v):
    """The canonical completion w of {u², uv, v²} inside the 4-dimensional
    space of sextics vanishing doubly at the 8 points.

    w is the reduced-echelon basis element of the kernel whose leading
    monomial is not a leading monomial of span{u², uv, v²}; that makes it
    depend only on the pencil, not on the basis (u, v)."""
    monoms = monomials_of_degree(6)
    one = _field_one(points)
    rows = []
    for p in points:
        # order >= 2 at p: the three first partials vanish (Euler covers the value)
        for var in range(3):
            rows.append(_partial_row(p, monoms, var, one))
    kern = kernel_basis(rows, len(monoms), one)
    if len(kern) != 4:
        raise DelPezzoError("double-vanishing sextics have dimension %d, expected 4" % len(kern))
    kred, kpivots = rref(kern, len(monoms))

    squares = [u * u, u * v, v * v]
    for s in squares:
        vec = s.coefficient_vector(6, monoms)
        for row in rows:
            acc = one - one
            for a, b in zip(row, vec):
                if a and b:
                    acc = acc + a * b
            if acc:
                raise DelPezzoError("u², uv, v² do not vanish doubly at the points")
    sred, spivots = rref([s.coefficient_vector(6, monoms) for s in squares], len(monoms))
    if len(spivots) != 3:
        raise DelPezzoError("u, v are not independent")
    extra = [q for q in kpivots if q not in set(spivots)]
    if len(extra) != 1:
        raise DelPezzoError("sextic span does not contain the square span")
    idx = kpivots.index(extra[0])
    return TriForm.from_coefficient_vector(kred[idx], 6)


def _bivariate_coeffs(form, chart=2):
    """TriForm restricted to chart `chart`=1, as a list of UniPoly in the
    first remaining variable, indexed by the power of the second."""
    out = {}
    for e, c in form.terms.items():
        rest = tuple(v for i, v in enumerate(e) if i != chart)
        out.setdefault(rest[1], {})[rest[0]] = out.get(rest[1], {}).get(rest[0], Fraction(0)) + c
    if not out:
        return []
    maxy = max(out)
    cols = []
    for j in range(maxy + 1):
        d = out.get(j, {})
        if d:
            size = max(d) + 1
            cols.append(UniPoly(tuple(d.get(i, Fraction(0)) for i in range(size))))
        else:
            cols.append(UniPoly())
    while cols and not cols[-1]:
        cols.pop()
    return cols


def _specialize_x(cols, x0):
    """Plug x = x0 into a _bivariate_coeffs list; returns a UniPoly in y."""
    return UniPoly(tuple(c(x0) for c in cols))


def singular_points_of_cubic(form):
    """All rational singular points of a plane cubic.

    Returns (points, positive_dimensional). positive_dimensional=True means
    the three partials share a common curve (non-reduced member), in which
    case the point list is not meaningful.
    """
    parts = [form.partial(i) for i in range(3)]
    found = []

    # chart z = 1
    cols = [_bivariate_coeffs(p, 2) for p in parts]
    pairs = [(0, 1), (0, 2), (1, 2)]
    res = None
    for a, b in pairs:
        if len(cols[a]) == 0 or len(cols[b]) == 0:
            continue
        r = resultant_in_w(cols[a], cols[b])
        if r:
            res = r
            break
    if res is None:
        # a vanishing partial or pairwise common factors among the partials:
        # only happens for reducible or non-reduced members, which classify
        # as "worse" regardless of the exact singular locus
        return [], True
    x_candidates = [r for r, _ in rational_roots(res)]
    for x0 in x_candidates:
        specs = [_specialize_x(c, x0) for c in cols]
        nonzero = [s for s in specs if s]
        if not nonzero:
            return [], True
        g = nonzero[0]
        for s in nonzero[1:]:
            g = g.gcd(s)
        if not g:
            return [], True
        if g.degree < 1:
            continue
        for y0, _ in rational_roots(g):
            if all(not p(x0, y0, Fraction(1)) for p in parts):
                found.append(ProjPoint(x0, y0, Fraction(1)))

    # line z = 0: candidates (1 : m : 0) and (0 : 1 : 0)
    ms = [UniPoly(tuple(_collect_line(p))) for p in parts]
    nonzero = [s for s in ms if s]
    if not nonzero:
        # all partials vanish on the whole line z = 0
        return [], True
    g = nonzero[0]
    for s in nonzero[1:]:
        g = g.gcd(s)
    if g.degree >= 1:
        for m0, _ in rational_roots(g):
            if all(not p(Fraction(1), m0, Fraction(0)) for p in parts):
                found.append(ProjPoint(Fraction(1), m0, Fraction(0)))
    if all(not p(Fraction(0), Fraction(1), Fraction(0)) for p in parts):
        found.append(ProjPoint(Fraction(0), Fraction(1), Fraction(0)))

    uniq = []
    for p in found:
        if p not in uniq:
            uniq.append(p)
    return uniq, False


def _collect_line(form):
    """Coefficients of form(1, m, 0) as a dense list in m."""
    out = {}
    for (i, j, k), c in form.terms.items():
        if k == 0:
            out[j] = out.get(j, Fraction(0)) + c
    if not out:
        return []
    return [out.get(j, Fraction(0)) for j in range(max(out) + 1)]


def classify_singularity(form, point):
    """'node', 'cusp', or 'worse' for a singular point of a plane cubic.

    Node: the degree-2 part of the local expansion is a nondegenerate
    quadratic. Cusp: the quadratic part is a double line and the cubic part
    does not vanish along it (that forces the curve irreducible). Everything
    else is 'worse'.
    """
    a, b, c = point.coords
    if c:
        colmap = [(1, 0, 0), (0, 1, 0), (a, b, c)]
    elif b:
        colmap = [(1, 0, 0), (0, 0, 1), (a, b, c)]
    else:
        colmap = [(0, 1, 0), (0, 0, 1), (a, b, c)]
    rows = [[Fraction(colmap[j][i]) for j in range(3)] for i in range(3)]
    local = form.substitute_linear(rows)

    f2 = {}
    f3 = {}
    for (i, j, k), coeff in local.terms.items():
        if k == 3 or k == 2 and (i + j) == 1:
            raise ValueError("point is not singular on the cubic")
        if k == 1:
            f2[(i, j)] = coeff
        else:
            f3[(i, j)] = coeff
    if not f2:
        return "worse"
    A = f2.get((2, 0), Fraction(0))
    B = f2.get((1, 1), Fraction(0))
    C = f2.get((0, 2), Fraction(0))
    disc = B * B - 4 * A * C
    if disc:
        return "node"
    # double line l_x X + l_y Y; its direction (v1, v2) kills the line
    if A:
        lx, ly = 2 * A, B
    else:
        lx, ly = B, 2 * C
    v1, v2 = ly, -lx
    val = Fraction(0)
    for (i, j), coeff in f3.items():
        val += coeff * v1 ** i * v2 ** j
    return "cusp" if val else "worse"


@dataclass
class PencilMember:
    param: tuple  # (lam, mu) coprime integers, form = lam*u + mu*v
    multiplicity: int
    form: TriForm
    singular_points: list
    kind: str  # node | cusp | worse


_MACAULAY_MONOMS = monomials_of_degree(4)
_NONREDUCED = [(2, 2, 0), (2, 0, 2), (0, 2, 2)]


def _pencil_resultant(u, v):
    """Degree-12 parameter form R(s) vanishing where u + s*v is singular,
    via the Macaulay resultant of the three partial-derivative quadrics.

    Returns (R, deg_deficit) where deg_deficit = 12 - deg R counts the
    multiplicity of the member at s = infinity (i.e. v itself).
    """
    from .algebra import det_bareiss

    qu = [u.partial(i) for i in range(3)]
    qv = [v.partial(i) for i in range(3)]
    quad_monoms = monomials_of_degree(2)
    index = {m: i for i, m in enumerate(_MACAULAY_MONOMS)}

    saw_nonzero_det = False
    last_err = None
    perms = ((0, 1, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0), (0, 2, 1), (1, 0, 2))
    for perm in perms:
        # each degree-4 monomial is assigned the first variable (in this
        # priority order) whose square divides it; the row is the quadric of
        # that variable's partial times the divided monomial
        rows = []
        for m in _MACAULAY_MONOMS:
            dvar = next(p for p in perm if m[p] >= 2)
            mult = list(m)
            mult[dvar] -= 2
            row = [UniPoly() for _ in _MACAULAY_MONOMS]
            for qm in quad_monoms:
                coeff_u = qu[dvar].terms.get(qm, Fraction(0))
                coeff_v = qv[dvar].terms.get(qm, Fraction(0))
                if not coeff_u and not coeff_v:
                    continue
                tgt = (mult[0] + qm[0], mult[1] + qm[1], mult[2] + qm[2])
                row[index[tgt]] = UniPoly((coeff_u, coeff_v))
            rows.append(row)
        detm = det_bareiss(rows)
        if not detm:
            continue
        saw_nonzero_det = True
        minor = [
            [rows[index[mr]][index[mc]] for mc in _NONREDUCED]
            for mr in _NONREDUCED
        ]
        try:
            detminor = det_bareiss(minor)
            if not detminor:
                raise ValueError("extraneous minor vanishes")
            r = detm // detminor
        except (ValueError, ZeroDivisionError) as err:
            last_err = err
            continue
        return r, 12 - r.degree
    if not saw_nonzero_det:
        raise DegeneratePencilError("every pencil member is singular")
    raise DelPezzoError("pencil discriminant failed in all variable orders: %s" % last_err)


def pencil_singular_members(u, v):
    """Singular members of the pencil spanned by u and v.

    Returns (members, irrational_factors): members are the rational
    parameters with their singular points and node/cusp/worse class;
    irrational_factors lists the irreducible non-linear factors of the
    parameter form (singular members not defined over Q), as (UniPoly, mult)
    in the affine parameter s of u + s*v.
    """
    r, inf_mult = _pencil_resultant(u, v)
    _, factors = factor_rational_poly(r)
    members = []
    irrational = []
    for f, mult in factors:
        if f.degree != 1:
            irrational.append((f, mult))
            continue
        s0 = -f.coeffs[0]
        lam, mu = s0.denominator, s0.numerator
        form = u.scale(lam) + v.scale(mu)
        members.append(_member_record((lam, mu), mult, form))
    if inf_mult > 0:
        members.append(_member_record((0, 1), inf_mult, v))
    members.sort(key=lambda m: (max(abs(m.param[0]), abs(m.param[1])), m.param))
    return members, irrational


def _member_record(param, mult, form):
    pts, posdim = singular_points_of_cubic(form)
    if posdim:
        return PencilMember(param, mult, form, [], "worse")
    kinds = {classify_singularity(form, p) for p in pts}
    if not pts:
        kind = "worse"  # singular only over an extension; no rational witness
    elif kinds == {"node"}:
        kind = "node"
    elif kinds == {"cusp"}:
        kind = "cusp"
    else:
        kind = "worse"
    return PencilMember(param, mult, form, pts, kind)


def ninth_base_point(u, v, known_points):
    """The ninth common zero of the pencil through 8 known rational points.

    Finds every rational common zero of u and v by elimination in two
    charts; for valid input there are exactly 9 and the new one is returned.
    """
    zeros = _rational_common_zeros(u, v)
    if len(zeros) != 9:
        raise DegeneratePencilError(
            "pencil base locus has %d rational points, expected 9" % len(zeros)
        )
    known = set(known_points)
    extra = [p for p in zeros if p not in known]
    if len(extra) != 1:
        raise DegeneratePencilError("base locus does not extend the 8 points by one")
    return extra[0]


def _rational_common_zeros(u, v):
    found = []
    cu = _bivariate_coeffs(u, 2)
    cv = _bivariate_coeffs(v, 2)
    if not cu or not cv:
        raise DegeneratePencilError("pencil member vanishes on the chart z=1")
    if len(cu) == 1 and len(cv) == 1:
        # both cubics free of y on this chart: unions of vertical lines,
        # impossible for a general-position base locus
        raise DegeneratePencilError("pencil members are unions of vertical lines")
    else:
        res = resultant_in_w(cu, cv)
        if not res:
            raise DegeneratePencilError("pencil has a common component")
        for x0, _ in rational_roots(res):
            fu = _specialize_x(cu, x0)
            fv = _specialize_x(cv, x0)
            if fu and fv:
                g = fu.gcd(fv)
            else:
                g = fu or fv
            if not g:
                raise DegeneratePencilError("pencil has a common vertical component")
            if g.degree < 1:
                continue
            for y0, _ in rational_roots(g):
                pt = ProjPoint(x0, y0, Fraction(1))
                if pt not in found:
                    found.append(pt)
    # line z = 0
    lu = UniPoly(tuple(_collect_line(u)))
    lv = UniPoly(tuple(_collect_line(v)))
    if lu and lv:
        g = lu.gcd(lv)
        if g.degree >= 1:
            for m0, _ in rational_roots(g):
                pt = ProjPoint(Fraction(1), m0, Fraction(0))
                if pt not in found:
                    found.append(pt)
    elif not lu and not lv:
        raise DegeneratePencilError("pencil contains the line at infinity")
    if not u(Fraction(0), Fraction(1), Fraction(0)) and not v(Fraction(0), Fraction(1), Fraction(0)):
        pt = ProjPoint(Fraction(0), Fraction(1), Fraction(0))
        if pt not in found:
            found.append(pt)
    return found


def _in_span(form, basis, degree):
    monoms = monomials_of_degree(degree)
    rows = [[b.coefficient_vector(degree, monoms)[i] for b in basis] for i in range(len(monoms))]
    sol = solve_linear_system(rows, form.coefficient_vector(degree, monoms))
    return sol.particular if sol.consistent else None


def build_del_pezzo(points, supplied_u=None):
    """Assemble the full del Pezzo data set from 8 rational points.

    If supplied_u is given it must be a cuspidal member of the cubic pencil;
    otherwise the rational cuspidal member of smallest parameter height is
    chosen. The companion generator v is the first echelon basis cubic
    independent of u.
    """
    report = check_general_position(points)
    if not report.passed:
        raise GeneralPositionError(report)
    basis = anticanonical_cubics(points)

    if supplied_u is not None:
        if _in_span(supplied_u, basis, 3) is None:
            raise DelPezzoError("supplied cubic does not vanish at the 8 points")
        u = supplied_u
        pts, posdim = singular_points_of_cubic(u)
        if posdim or len(pts) != 1 or classify_singularity(u, pts[0]) != "cusp":
            raise DelPezzoError("supplied cubic is not cuspidal")
        cusp = pts[0]
    else:
        members, _ = pencil_singular_members(basis[0], basis[1])
        cusp = None
        for m in members:
            if m.kind == "cusp" and len(m.singular_points) == 1:
                u = m.form.content_cleared()
                cusp = m.singular_points[0]
                break
        if cusp is None:
            raise DelPezzoError("pencil has no rational cuspidal member")

    v = None
    monoms = monomials_of_degree(3)
    for cand in basis:
        uv_vecs = [u.coefficient_vector(3, monoms), cand.coefficient_vector(3, monoms)]
        _, piv = rref(uv_vecs, len(monoms))
        if len(piv) == 2:
            v = cand
            break
    if v is None:
        raise DelPezzoError("could not complete u to a pencil basis")

    w = bianticanonical_sextics(points, u, v)
    base_o = ninth_base_point(u, v, points)
    if cusp in set(points) or cusp == base_o:
        raise DelPezzoError("cusp of u collides with the base locus")
    return DelPezzoData(list(points), u, v, w, base_o, cusp)
