"""Order-3 symmetry and rational 2-torsion: orbit counting bounds plus a
verified 8-point configuration over Q(zeta_3).

An order-3 action on F_2^(2g) with no nonzero fixed vector splits the
nonzero vectors into free orbits of size 3, so there are (2^(2g) + 2)/3
orbits in all. When the action commutes with a Galois action that inverts
it, at most one member of each free orbit can be rational, which caps the
F_2-rank of the rational part at log_2 of the orbit count. This module
computes those counts (by formula and by direct enumeration on explicit
F_2 matrices) and checks the concrete planar configuration whose 8 points
are permuted by (x : y : z) -> (x : zeta y : zeta^2 z).
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import NumberField, UniPoly
from .delpezzo import ProjPoint, check_general_position

# x^2 + x + 1, the minimal polynomial of a primitive cube root of unity
_ZETA_MINPOLY = UniPoly.from_ints([1, 1, 1])

# direct orbit enumeration sweeps all of F_2^(2g); cap the dimension
_ENUMERATION_LIMIT = 10


class Mu3Error(Exception):
    pass


def orbit_count_formula(g):
    """Number of orbits of a fixed-point-free order-3 action on F_2^(2g):
    the zero orbit plus (2^(2g) - 1)/3 free orbits, i.e. (2^(2g) + 2)/3."""
    if g < 1:
        raise ValueError("genus must be at least 1")
    total = (1 << (2 * g)) + 2
    # 4^g = 1 mod 3, so the division is exact
    assert total % 3 == 0
    return total // 3


def rank_bound(g):
    """Cap on the F_2-rank of the rational 2-torsion in the presence of a
    fixed-point-free order-3 symmetry: at most one representative of each
    of the (2^(2g) + 2)/3 orbits is rational, and a rank-r subgroup has
    2^r elements, so r <= floor(log2((2^(2g) + 2)/3))."""
    return orbit_count_formula(g).bit_length() - 1


def _column_masks(rows):
    """An F_2 matrix as per-column bitmasks: bit i of mask j is rows[i][j].
    Entries are reduced mod 2."""
    n = len(rows)
    cols = [0] * n
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ValueError("matrix must be square")
        for j, entry in enumerate(row):
            if entry % 2:
                cols[j] |= 1 << i
    return cols


def _apply_bits(cols, vec):
    out = 0
    j = 0
    while vec:
        if vec & 1:
            out ^= cols[j]
        vec >>= 1
        j += 1
    return out


def sigma_orbit_count(rows):
    """Count the orbits of an order-3 matrix acting on all of F_2^n by
    direct enumeration. The matrix must satisfy M^3 = I and fix no nonzero
    vector; violations raise Mu3Error, naming a fixed vector when one
    exists."""
    cols = _column_masks(rows)
    n = len(cols)
    if n > _ENUMERATION_LIMIT:
        raise Mu3Error("direct enumeration is limited to %d x %d matrices"
                       % (_ENUMERATION_LIMIT, _ENUMERATION_LIMIT))
    size = 1 << n
    for v in range(1, size):
        w = _apply_bits(cols, v)
        if w == v:
            bits = tuple((v >> i) & 1 for i in range(n))
            raise Mu3Error("matrix fixes the nonzero vector %s" % (bits,))
        if _apply_bits(cols, _apply_bits(cols, w)) != v:
            raise Mu3Error("matrix does not satisfy M^3 = I")
    seen = bytearray(size)
    count = 0
    for v in range(size):
        if seen[v]:
            continue
        count += 1
        w = v
        for _ in range(3):
            seen[w] = 1
            w = _apply_bits(cols, w)
    # all nonzero orbits are free, so the tally is forced
    assert count == (size + 2) // 3
    return count


def eisenstein_field():
    """Q(zeta_3) as Q[x]/(x^2 + x + 1)."""
    return NumberField(_ZETA_MINPOLY)


@dataclass(frozen=True)
class Mu3Config:
    """8 points of P^2 with coordinates in Q(zeta_3), together with a 3x3
    matrix meant to permute them with projective order 3."""

    points: tuple
    automorphism: tuple  # three rows of three field elements


@dataclass
class Mu3Report:
    passed: bool
    general_position: object  # report from the planar position checker
    invariant: bool  # automorphism maps the point set into itself
    order_three: bool  # automorphism has projective order exactly 3
    galois_orbit_count: object  # int, or None if not conjugation-stable
    flags: tuple


def example_config():
    """The stock configuration: the coordinate vertices (0:1:0) and (0:0:1)
    are fixed by (x : y : z) -> (x : zeta y : zeta^2 z), and the zeta-scaled
    translates of (1:1:1) and (3:4:5) form two 3-cycles."""
    field = eisenstein_field()
    zero = field.zero()
    one = field.one()
    zeta = field.generator()
    zeta2 = zeta * zeta
    points = (
        ProjPoint(zero, one, zero),
        ProjPoint(zero, zero, one),
        ProjPoint(one, one, one),
        ProjPoint(one, zeta, zeta2),
        ProjPoint(one, zeta2, zeta),
        ProjPoint(field(3), field(4), field(5)),
        ProjPoint(field(3), 4 * zeta, 5 * zeta2),
        ProjPoint(field(3), 4 * zeta2, 5 * zeta),
    )
    automorphism = (
        (one, zero, zero),
        (zero, zeta, zero),
        (zero, zero, zeta2),
    )
    return Mu3Config(points, automorphism)


def _mat_mul(m1, m2):
    out = []
    for row in m1:
        new = []
        for j in range(3):
            acc = row[0] * m2[0][j]
            for k in (1, 2):
                acc = acc + row[k] * m2[k][j]
            new.append(acc)
        out.append(tuple(new))
    return tuple(out)


def _apply_matrix(m, point):
    coords = []
    for row in m:
        acc = row[0] * point[0]
        for k in (1, 2):
            acc = acc + row[k] * point[k]
        coords.append(acc)
    return coords


def _projectively_identity(m):
    pivot = m[0][0]
    if not pivot:
        return False
    for i in range(3):
        for j in range(3):
            if i != j and m[i][j]:
                return False
    return m[1][1] == pivot and m[2][2] == pivot


def _conjugate_elem(e):
    """Image of a + b*zeta under zeta -> zeta^2 = -1 - zeta."""
    if e.field.minpoly != _ZETA_MINPOLY:
        raise Mu3Error("coordinates must lie in Q(zeta_3)")
    a, b = e.coeffs
    return e.field((a - b, -b))


def _conjugate_point(p):
    return ProjPoint(*[_conjugate_elem(c) for c in p.coords])


def _galois_orbit_count(points):
    """Orbits of the point set under zeta -> zeta^2, or None when some
    conjugate escapes the set (the set is then not defined over Q)."""
    pts = set(points)
    seen = set()
    count = 0
    for p in points:
        if p in seen:
            continue
        q = _conjugate_point(p)
        if q not in pts:
            return None
        count += 1
        seen.add(p)
        seen.add(q)
    return count


def check_mu3_example(points=None, automorphism=None):
    """Full workup of an order-3-symmetric configuration: general position
    of the 8 points over Q(zeta_3), stability of the point set under the
    automorphism, projective order exactly 3, and exactly 6 orbits under
    the conjugation zeta -> zeta^2.

    With no arguments this checks the stock configuration, which passes
    with orbit count 6. Either piece can be overridden to probe failures;
    every defect is recorded rather than raised."""
    stock = example_config()
    pts = tuple(points) if points is not None else stock.points
    if automorphism is not None:
        auto = tuple(tuple(row) for row in automorphism)
    else:
        auto = stock.automorphism

    flags = []
    gp = check_general_position(list(pts))
    if not gp.passed:
        flags.append("points are not in general position")

    cube = _mat_mul(_mat_mul(auto, auto), auto)
    order_three = _projectively_identity(cube) and not _projectively_identity(auto)
    if not order_three:
        flags.append("automorphism is not of order 3")

    point_set = set(pts)
    invariant = True
    for p in pts:
        try:
            image = ProjPoint(*_apply_matrix(auto, p))
        except ValueError:
            # singular matrix crushed the point to (0 : 0 : 0)
            invariant = False
            break
        if image not in point_set:
            invariant = False
            break
    if not invariant:
        flags.append("point set is not stable under the automorphism")

    orbit_count = _galois_orbit_count(pts)
    if orbit_count is None:
        flags.append("point set is not stable under conjugation")
    elif orbit_count != 6:
        flags.append("expected 6 conjugation orbits, found %d" % orbit_count)

    passed = gp.passed and invariant and order_three and orbit_count == 6
    return Mu3Report(passed, gp, invariant, order_three, orbit_count, tuple(flags))
