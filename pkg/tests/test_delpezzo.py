import random
from fractions import Fraction as F
from pathlib import Path

import pytest

from classrank.algebra import NumberField, TriForm, UniPoly
from classrank.delpezzo import (
    DegeneratePencilError,
    DelPezzoError,
    ProjPoint,
    anticanonical_cubics,
    bianticanonical_sextics,
    build_del_pezzo,
    check_general_position,
    classify_singularity,
    ninth_base_point,
    pencil_singular_members,
    singular_points_of_cubic,
)

DATA = Path(__file__).parent / "data"

DEMO_POINTS = [(0, -2, 1), (3, -9, 1), (3, 7, 1), (8, 26, 1),
               (15, 63, 1), (24, 124, 1), (48, 342, 1), (0, 0, 1)]


def demo_points():
    return [ProjPoint.of_fractions(*t) for t in DEMO_POINTS]


def xyz():
    return TriForm.variable(0), TriForm.variable(1), TriForm.variable(2)


def golden():
    out = {}
    for line in (DATA / "demo_pencil_golden.txt").read_text().splitlines():
        if "=" in line and not line.startswith("#"):
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


class TestProjPoint:
    def test_normalization(self):
        p = ProjPoint.of_fractions(4, 6, 2)
        assert p.coords == (F(2), F(3), F(1))
        q = ProjPoint.of_fractions(3, 5, 0)
        assert q.coords == (F(3, 5), F(1), F(0))
        assert ProjPoint.of_fractions(8, 12, 4) == p

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            ProjPoint.of_fractions(0, 0, 0)


class TestGeneralPosition:
    def test_demo_points_pass(self):
        rep = check_general_position(demo_points())
        assert rep.passed and not rep.failures

    def test_coincident(self):
        pts = demo_points()
        pts[5] = pts[2]
        rep = check_general_position(pts)
        assert not rep.passed
        assert ("coincident", (2, 5)) in rep.failures

    def test_collinear_witness(self):
        pts = [ProjPoint.of_fractions(*t) for t in
               [(0, 0, 1), (1, 0, 1), (2, 0, 1), (0, 1, 1),
                (1, 2, 1), (3, 5, 1), (4, 9, 1), (5, 14, 1)]]
        rep = check_general_position(pts)
        assert not rep.passed
        assert ("collinear", (0, 1, 2)) in rep.failures

    def test_conic_witness(self):
        # first six points on the circle x^2 + y^2 = 25 z^2
        pts = [ProjPoint.of_fractions(*t) for t in
               [(5, 0, 1), (-5, 0, 1), (0, 5, 1), (3, 4, 1),
                (4, -3, 1), (-3, -4, 1), (1, 1, 1), (2, 7, 1)]]
        rep = check_general_position(pts)
        assert not rep.passed
        assert ("conic", (0, 1, 2, 3, 4, 5)) in rep.failures

    def test_singular_cubic_witness(self):
        # seven smooth points of y^2 z = x^3 plus its cusp at index 7
        pts = [ProjPoint.of_fractions(t * t, t ** 3, 1) for t in range(1, 8)]
        pts.append(ProjPoint.of_fractions(0, 0, 1))
        rep = check_general_position(pts)
        assert not rep.passed
        assert ("singular_cubic", (7,)) in rep.failures

    def test_invariance_under_linear_change(self):
        rng = random.Random(41)
        base = demo_points()
        for _ in range(5):
            # random unimodular matrix from elementary row operations
            m = [[F(1 if i == j else 0) for j in range(3)] for i in range(3)]
            for _ in range(6):
                i, j = rng.sample(range(3), 2)
                c = F(rng.randint(-3, 3))
                for k in range(3):
                    m[i][k] += c * m[j][k]
            moved = [
                ProjPoint(*[sum(m[r][c] * p.coords[c] for c in range(3)) for r in range(3)])
                for p in base
            ]
            assert check_general_position(moved).passed

    def test_zeta3_configuration(self):
        K = NumberField(UniPoly.from_ints([1, 1, 1]))
        z = K.generator()
        z2 = z * z
        one, zero = K.one(), K.zero()
        pts = [
            ProjPoint(zero, one, zero), ProjPoint(zero, zero, one),
            ProjPoint(one, one, one), ProjPoint(one, z, z2), ProjPoint(one, z2, z),
            ProjPoint(K(3), K(4), K(5)),
            ProjPoint(K(3), K(4) * z, K(5) * z2),
            ProjPoint(K(3), K(4) * z2, K(5) * z),
        ]
        assert check_general_position(pts).passed


class TestLinearSystems:
    def test_anticanonical_contains_demo_cubic(self):
        basis = anticanonical_cubics(demo_points())
        assert len(basis) == 2
        x, y, z = xyz()
        u = (x + z) ** 3 - (y + z) ** 2 * z
        assert basis[0] == u  # echelon leader happens to be the cuspidal cubic

    def test_members_vanish_at_points(self):
        pts = demo_points()
        basis = anticanonical_cubics(pts)
        rng = random.Random(43)
        for _ in range(5):
            a, b = F(rng.randint(-9, 9)), F(rng.randint(-9, 9))
            member = basis[0].scale(a) + basis[1].scale(b)
            for p in pts:
                assert not member(*p.coords)

    def test_sextic_completion_golden(self):
        pts = demo_points()
        basis = anticanonical_cubics(pts)
        w = bianticanonical_sextics(pts, basis[0], basis[1])
        g = golden()
        assert w.to_str() == g["w"]

    def test_sextic_double_vanishing_and_independence(self):
        pts = demo_points()
        u, v = anticanonical_cubics(pts)
        w = bianticanonical_sextics(pts, u, v)
        for p in pts:
            for i in range(3):
                assert not w.partial(i)(*p.coords)
            assert not w(*p.coords)
        from classrank.algebra import monomials_of_degree, rref

        m6 = monomials_of_degree(6)
        vecs = [f.coefficient_vector(6, m6) for f in (u * u, u * v, v * v, w)]
        assert len(rref(vecs, len(m6))[1]) == 4

    def test_w_canonical_under_pencil_basis_change(self):
        pts = demo_points()
        u, v = anticanonical_cubics(pts)
        w1 = bianticanonical_sextics(pts, u, v)
        w2 = bianticanonical_sextics(pts, u + v.scale(3), v.scale(2) - u)
        assert w1 == w2


class TestSingularities:
    def test_cusp_and_node_prototypes(self):
        x, y, z = xyz()
        assert classify_singularity(y * y * z - x ** 3, ProjPoint.of_fractions(0, 0, 1)) == "cusp"
        assert classify_singularity(y * y * z - x ** 3 - x * x * z,
                                    ProjPoint.of_fractions(0, 0, 1)) == "node"

    def test_nonsingular_point_rejected(self):
        x, y, z = xyz()
        with pytest.raises(ValueError):
            classify_singularity(y * y * z - x ** 3, ProjPoint.of_fractions(1, 1, 1))

    def test_triple_line_worse(self):
        x, y, z = xyz()
        pts, posdim = singular_points_of_cubic(z ** 3)
        assert posdim

    def test_concurrent_lines(self):
        x, y, z = xyz()
        form = x * y * (x + y)  # three lines through (0:0:1)
        pts, posdim = singular_points_of_cubic(form)
        if not posdim:
            assert ProjPoint.of_fractions(0, 0, 1) in pts
            assert classify_singularity(form, ProjPoint.of_fractions(0, 0, 1)) == "worse"

    def test_singular_points_of_demo_cubic(self):
        x, y, z = xyz()
        u = (x + z) ** 3 - (y + z) ** 2 * z
        pts, posdim = singular_points_of_cubic(u)
        assert not posdim
        assert pts == [ProjPoint.of_fractions(-1, -1, 1)]


class TestPencil:
    def test_hesse_pencil(self):
        x, y, z = xyz()
        members, irrational = pencil_singular_members(x ** 3 + y ** 3 + z ** 3, x * y * z)
        total = sum(m.multiplicity for m in members)
        total += sum(f.degree * m for f, m in irrational)
        assert total == 12
        by_param = {m.param: m for m in members}
        # member at s = -3 is the triangle (x+y+z)(conic); s = infinity is xyz
        assert by_param[(1, -3)].multiplicity == 3
        assert by_param[(0, 1)].multiplicity == 3
        assert ProjPoint.of_fractions(1, 1, 1) in by_param[(1, -3)].singular_points
        assert len(by_param[(0, 1)].singular_points) == 3
        assert [f.degree for f, _ in irrational] == [2]

    def test_demo_pencil(self):
        basis = anticanonical_cubics(demo_points())
        members, irrational = pencil_singular_members(basis[0], basis[1])
        total = sum(m.multiplicity for m in members)
        total += sum(f.degree * m for f, m in irrational)
        assert total == 12
        cusps = [m for m in members if m.kind == "cusp"]
        assert len(cusps) == 1
        assert cusps[0].param == (1, 0) and cusps[0].multiplicity == 2
        assert cusps[0].singular_points == [ProjPoint.of_fractions(-1, -1, 1)]

    def test_smooth_generator_not_reported(self):
        x, y, z = xyz()
        # Hesse pencil again: the Fermat cubic itself (param (1,0)) is smooth
        members, _ = pencil_singular_members(x ** 3 + y ** 3 + z ** 3, x * y * z)
        assert (1, 0) not in {m.param for m in members}


class TestNinthBasePoint:
    def test_synthetic_grid(self):
        x, y, z = xyz()
        u = x * (x - z) * (x + z)
        v = y * (y - z) * (y + z)
        known = [ProjPoint.of_fractions(a, b, 1)
                 for a in (-1, 0, 1) for b in (-1, 0, 1) if (a, b) != (0, 0)]
        o = ninth_base_point(u, v, known)
        assert o == ProjPoint.of_fractions(0, 0, 1)

    def test_demo_golden(self):
        pts = demo_points()
        u, v = anticanonical_cubics(pts)
        o = ninth_base_point(u, v, pts)
        g = golden()
        a, b, c = (F(s.strip()) for s in g["O"].split(":"))
        assert o == ProjPoint(a, b, c)
        assert not u(*o.coords) and not v(*o.coords)
        assert o not in set(pts)

    def test_common_component_rejected(self):
        x, y, z = xyz()
        u = x * y * z
        v = x * (x * x + y * y - z * z)
        with pytest.raises(DegeneratePencilError):
            ninth_base_point(u, v, [])


class TestBuild:
    def test_auto_selects_cuspidal_generator(self):
        dp = build_del_pezzo(demo_points())
        x, y, z = xyz()
        assert dp.u == (x + z) ** 3 - (y + z) ** 2 * z
        assert dp.cusp == ProjPoint.of_fractions(-1, -1, 1)
        assert dp.base_point_O not in set(dp.points)
        assert dp.cusp != dp.base_point_O

    def test_supplied_u_honored(self):
        x, y, z = xyz()
        u = (x + z) ** 3 - (y + z) ** 2 * z
        dp = build_del_pezzo(demo_points(), supplied_u=u.scale(F(2)))
        assert dp.u == u.scale(F(2))

    def test_supplied_noncuspidal_rejected(self):
        pts = demo_points()
        basis = anticanonical_cubics(pts)
        with pytest.raises(DelPezzoError):
            build_del_pezzo(pts, supplied_u=basis[1])

    def test_bad_points_rejected(self):
        pts = demo_points()
        pts[0] = ProjPoint.of_fractions(3, -9, 1)
        with pytest.raises(DelPezzoError):
            build_del_pezzo(pts)
