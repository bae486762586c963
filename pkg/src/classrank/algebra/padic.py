"""p-adic valuations, Newton polygon primitives, and place splitting.

Valuations are Fractions, with a single INF sentinel for the zero element.
Newton polygons are lower convex hulls of (index, valuation) points; their
segment slopes increase left to right, and a segment of slope s and
horizontal width w accounts for w roots of valuation -s.

padic_splitting classifies the places of Q[x]/(f) above p for deg f <= 3,
returning exact ramification and residue degrees without any working
precision: when Dedekind's criterion certifies the equation order
p-maximal the mod-p factorization is read off directly, otherwise an exact
polygon recursion with rational shifts separates the places.
"""

from __future__ import annotations

from fractions import Fraction

from .unipoly import UniPoly


class _Infinity:
    """Valuation of zero. Compares above every Fraction."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("padic-infinity")

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __repr__(self):
        return "INF"


INF = _Infinity()


def valuation(x, p):
    """p-adic valuation of a Fraction or int; INF for zero."""
    if isinstance(x, int):
        if x == 0:
            return INF
        v = 0
        while x % p == 0:
            x //= p
            v += 1
        return Fraction(v)
    if not x:
        return INF
    n, d = x.numerator, x.denominator
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return Fraction(v)


def reduce_mod_p(x, p):
    """Residue of a p-integral rational in {0, ..., p-1}."""
    n, d = (x.numerator, x.denominator) if isinstance(x, Fraction) else (x, 1)
    if d % p == 0:
        raise ValueError("not p-integral")
    return n * pow(d, -1, p) % p


def newton_polygon_vertices(points):
    """Lower convex hull of (index, valuation) points, left to right.

    Points with INF valuation are skipped. Returns the vertex list; a single
    point yields a one-vertex hull.
    """
    pts = sorted((i, v) for i, v in points if v is not INF)
    if not pts:
        return []
    hull = []
    for pt in pts:
        # equal index: the sort put the lower valuation first, keep only it
        if hull and hull[-1][0] == pt[0]:
            continue
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            x3, y3 = pt
            # keep hull lower-convex: drop the middle point when it lies on
            # or above the segment from hull[-2] to pt
            if (y2 - y1) * (x3 - x2) >= (y3 - y2) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def _slope(p1, p2):
    (x1, y1), (x2, y2) = p1, p2
    return Fraction(y2 - y1) / Fraction(x2 - x1)


def newton_polygon_slopes(points):
    """Segments of the lower hull as (slope, width) pairs, slopes increasing."""
    hull = newton_polygon_vertices(points)
    return [(_slope(a, b), b[0] - a[0]) for a, b in zip(hull, hull[1:])]


def root_valuations(points):
    """Root valuations with multiplicities [(valuation, count)], decreasing.

    The input lists (i, v(a_i)) for a polynomial sum a_i x^i whose lowest and
    highest listed indices have finite valuation.
    """
    return [(-s, w) for s, w in newton_polygon_slopes(points)]


def min_root_valuation(coeff_vals):
    """Smallest root valuation from a dense list of coefficient valuations."""
    pts = [(i, v) for i, v in enumerate(coeff_vals)]
    rv = root_valuations(pts)
    if not rv:
        raise ValueError("polygon has no segment")
    return rv[-1][0]


def poly_valuations(poly, p):
    """Dense coefficient valuation list for a UniPoly over Q."""
    return [valuation(c, p) for c in poly.coeffs]


# ---------------------------------------------------------------------------
# place splitting


def _trim_mod_p(coeffs, p):
    out = [c % p for c in coeffs]
    while out and not out[-1]:
        out.pop()
    return out


def _gcd_mod_p(a, b, p):
    """Monic gcd of two coefficient lists (low to high) over F_p."""
    a, b = _trim_mod_p(a, p), _trim_mod_p(b, p)
    while b:
        inv = pow(b[-1], -1, p)
        r = list(a)
        for shift in range(len(r) - len(b), -1, -1):
            q = r[shift + len(b) - 1] * inv % p
            if q:
                for i, bc in enumerate(b):
                    r[shift + i] = (r[shift + i] - q * bc) % p
        a, b = b, _trim_mod_p(r, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def dedekind_index_divisible(poly, p):
    """Dedekind's criterion: does p divide the index [O_K : Z[theta]] of the
    equation order of a monic p-integral polynomial."""
    from . import numutil

    if any(valuation(c, p) < 0 for c in poly.coeffs):
        raise ValueError("polynomial is not p-integral")
    _, factors = numutil.factor_poly_mod_p(poly, p)
    if all(m == 1 for _, m in factors):
        return False
    gstar = UniPoly((Fraction(1),))
    hstar = UniPoly((Fraction(1),))
    for coeffs, mult in factors:
        lift = UniPoly.from_ints(coeffs)
        gstar = gstar * lift
        for _ in range(mult - 1):
            hstar = hstar * lift
    diff = gstar * hstar - poly
    fbar = [reduce_mod_p(c / p, p) for c in diff.coeffs]
    g = _gcd_mod_p(fbar, [reduce_mod_p(c, p) for c in gstar.coeffs], p)
    g = _gcd_mod_p(g, [reduce_mod_p(c, p) for c in hstar.coeffs], p)
    return len(g) > 1


def _p_integral_model(g, p):
    """Monic p-integral polynomial with the same places (x -> x / p^a)."""
    d = g.degree
    a = 0
    for j, c in enumerate(g.coeffs[:-1]):
        v = valuation(c, p)
        if v is not INF and v < 0:
            a = max(a, -(int(v) // (d - j)))
    if not a:
        return g
    pa = Fraction(p) ** a
    return UniPoly(tuple(c * pa ** (d - j) for j, c in enumerate(g.coeffs)))


def _polygon_places(g, p, top, depth):
    """Places attached to the roots of positive valuation of g (to all roots
    when top is set), by Newton polygon descent with rational shifts."""
    from . import numutil

    if depth > 64:
        raise ValueError("place recursion did not terminate")
    pts = [(i, valuation(c, p)) for i, c in enumerate(g.coeffs)]
    hull = newton_polygon_vertices(pts)
    out = []
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        slope = Fraction(y1 - y0) / (x1 - x0)
        width = x1 - x0
        if slope > 0 or (slope == 0 and not top):
            continue
        den = (-slope).denominator
        if den > 1:
            # ramified segment; degree <= 3 leaves no residual factor room
            out.append((den, width // den))
            continue
        res = []
        for j in range(width + 1):
            c = g.coeffs[x0 + j]
            want = y0 + slope * j
            if c and valuation(c, p) == want:
                res.append(reduce_mod_p(c / Fraction(p) ** int(want), p))
            else:
                res.append(0)
        _, rfactors = numutil.factor_poly_mod_p(UniPoly.from_ints(res), p)
        for coeffs, mult in rfactors:
            if mult == 1:
                out.append((1, len(coeffs) - 1))
                continue
            if len(coeffs) != 2:
                raise ValueError("unexpected repeated residual factor")
            lam = int(-slope)
            z0 = (-coeffs[0]) % p
            shift = UniPoly((Fraction(z0 * p ** lam), Fraction(p ** lam)))
            out.extend(_polygon_places(g.compose(shift), p, False, depth + 1))
    return out


def _irreducible_places(g, p):
    from . import numutil

    if g.degree == 1:
        return [(1, 1)]
    g = _p_integral_model(g, p)
    _, factors = numutil.factor_poly_mod_p(g, p)
    if all(m == 1 for _, m in factors):
        return [(1, len(c) - 1) for c, _ in factors]
    if not dedekind_index_divisible(g, p):
        # equation order p-maximal: multiplicities are ramification indices
        return [(m, len(c) - 1) for c, m in factors]
    return _polygon_places(g, p, True, 0)


def padic_splitting(poly, p):
    """Places of Q[x]/(poly) above p, as (e, f) pairs sorted by (e*f, e).

    poly must be monic, squarefree over Q, of degree 1 to 3. The sum of
    e*f over the returned places equals the degree.
    """
    from . import numutil

    if not poly.coeffs or poly.lc() != 1:
        raise ValueError("monic polynomial required")
    if not 1 <= poly.degree <= 3:
        raise ValueError("place splitting is implemented for degree <= 3")
    _, factors = numutil.factor_rational_poly(poly)
    if any(m > 1 for _, m in factors):
        raise ValueError("squarefree polynomial required")
    out = []
    for g, _ in factors:
        out.extend(_irreducible_places(g, p))
    out.sort(key=lambda ef: (ef[0] * ef[1], ef[0]))
    return out
