import random
from fractions import Fraction as Fr

import pytest

from classrank.algebra import TriForm, UniPoly, resultant_in_w
from classrank import twotorsion as tt
from classrank.branchcurve import build_trigonal_model
from classrank.delpezzo import ProjPoint, build_del_pezzo
from classrank.twotorsion import (
    KummerFunction,
    TorsionError,
    expand_branches,
    branch_residual_order,
    image_cubic_from_values,
    kummer_function,
    matrix_rank_f2,
    pair,
    shift_parameters,
    theta_divisors,
    torsion_basis_data,
    weil_pairing_matrix,
)

DEMO_POINTS = [(0, -2, 1), (3, -9, 1), (3, 7, 1), (8, 26, 1),
               (15, 63, 1), (24, 124, 1), (48, 342, 1), (0, 0, 1)]


@pytest.fixture(scope="module")
def surface():
    return build_del_pezzo([ProjPoint.of_fractions(*p) for p in DEMO_POINTS])


@pytest.fixture(scope="module")
def model(surface):
    return build_trigonal_model(surface)


@pytest.fixture(scope="module")
def torsion(surface, model):
    return torsion_basis_data(surface, model)


def mono(i, j, k, c=1):
    return TriForm.monomial(i, j, k, c)


def published_h():
    return KummerFunction(0, Fr(-484335370397555869540982096),
                          Fr(21745428828566997697489),
                          Fr(-184765518741585604),
                          Fr(22709411000816400))


def published_model_coeffs():
    a2 = UniPoly((Fr(0), Fr(-1208223, 4), Fr(136902207241, 16)))
    a1 = UniPoly((Fr(0), Fr(-316801, 4), Fr(234505995159, 8),
                  Fr(-13786310912398097, 8), Fr(24403582287284966245)))
    a0 = UniPoly((Fr(0), Fr(11025), Fr(158059424789, 16),
                  Fr(-9000960055643209, 8), Fr(1338378986926042827721, 16),
                  Fr(-2457892462046662336694429),
                  Fr(23200074887895098984232713028)))
    one = UniPoly((Fr(1),))
    return [a0, a1, a2, one]


class TestExpandBranches:
    def test_split_tangent_cone(self):
        # y^3 - x^3 z + x^4: cone y^3 - x^3 factors as (y - x)(y^2 + xy + x^2)
        f = mono(0, 3, 1) - mono(3, 0, 1) + mono(4, 0, 0)
        exp = expand_branches(f, ProjPoint.of_fractions(0, 0, 1), precision=8)
        assert sorted(b.degree for b in exp.branches) == [1, 2]
        assert branch_residual_order(exp, f) == [None, None]

    def test_vertical_tangent(self):
        # cone x(y - x)(y + x) has a vertical direction
        f = mono(1, 2, 1) - mono(3, 0, 1) + mono(0, 4, 0)
        exp = expand_branches(f, ProjPoint.of_fractions(0, 0, 1), precision=6)
        assert sorted(b.degree for b in exp.branches) == [1, 1, 1]
        assert any(b.swapped for b in exp.branches)
        assert branch_residual_order(exp, f) == [None, None, None]

    def test_node_rejected(self):
        f = mono(2, 0, 2) - mono(0, 2, 2) + mono(4, 0, 0)
        with pytest.raises(TorsionError, match="wrong multiplicity"):
            expand_branches(f, ProjPoint.of_fractions(0, 0, 1))

    def test_smooth_point_rejected(self):
        f = mono(1, 0, 3) + mono(0, 4, 0)
        with pytest.raises(TorsionError, match="wrong multiplicity"):
            expand_branches(f, ProjPoint.of_fractions(0, 0, 1))

    def test_repeated_tangent_rejected(self):
        # cone x^2 y: the vertical direction x = 0 is doubled
        f = mono(2, 1, 1) + mono(4, 0, 0) + mono(0, 4, 0)
        with pytest.raises(TorsionError, match="non-ordinary"):
            expand_branches(f, ProjPoint.of_fractions(0, 0, 1))

    def test_repeated_slope_rejected(self):
        # cone x y^2: the direction y = 0 is doubled
        f = mono(1, 2, 1) + mono(4, 0, 0) + mono(0, 4, 0)
        with pytest.raises(TorsionError, match="non-ordinary"):
            expand_branches(f, ProjPoint.of_fractions(0, 0, 1))

    def test_demo_point_branches(self, model):
        f = model.singular_plane_model
        exp = expand_branches(f, ProjPoint.of_fractions(3, 7, 1), precision=12)
        assert sum(b.degree for b in exp.branches) == 3
        assert branch_residual_order(exp, f) == [None] * len(exp.branches)

    def test_doubling_precision_keeps_residual_zero(self, model):
        f = model.singular_plane_model
        exp = expand_branches(f, ProjPoint.of_fractions(0, -2, 1), precision=16)
        assert branch_residual_order(exp, f) == [None] * len(exp.branches)


class TestThetaDivisors:
    def test_image_cubic_synthetic(self):
        cubic = image_cubic_from_values(
            [(None, Fr(1), 1), (None, Fr(2), 1), (None, Fr(3), 1)])
        assert cubic == UniPoly((Fr(-6), Fr(11), Fr(-6), Fr(1)))

    def test_image_cubic_wrong_total(self):
        with pytest.raises(TorsionError):
            image_cubic_from_values([(None, Fr(1), 1), (None, Fr(2), 1)])

    def test_eight_odd_thetas(self, torsion):
        thetas, even, _, _ = torsion
        assert len(thetas) == 8
        assert all(th.kind == "odd" for th in thetas)
        assert even.kind == "even"

    def test_cubics_monic_rational(self, torsion):
        for th in torsion[0]:
            assert th.cubic.degree == 3
            assert th.cubic.lc() == 1

    def test_images_are_cubic_roots(self, torsion):
        for th in torsion[0]:
            for b in th.expansion.branches:
                coeffs = th.cubic.coeffs
                if b.field is not None:
                    coeffs = tuple(b.field(c) for c in coeffs)
                assert not UniPoly(coeffs)(b.t_image)

    def test_classes_pairwise_distinct(self, torsion):
        cubics = [tuple(th.cubic.coeffs) for th in torsion[0]]
        assert len(set(cubics)) == 8

    def test_golden_first_cubic(self, torsion):
        g0 = torsion[0][0].cubic
        d = Fr(1, 16505489194415872447)
        assert g0 == UniPoly((-4352834066320152000 * d, 20411925606964982991 * d,
                              -31831016133597955282 * d, Fr(1)))


class TestKummerFunctions:
    def test_golden_first_h(self, torsion):
        h = torsion[2][0]
        assert h.coefficients() == (Fr(100536025446024), Fr(-130502173896144),
                                    Fr(-6421116583), Fr(42431486731200))

    def test_normalization(self, torsion):
        for h in torsion[2]:
            assert h.delta
            assert h.normalized(Fr(0), Fr(0)) == 1

    def test_resultant_square_identity(self, torsion, model):
        thetas, _, kummers, _ = torsion
        h, th = kummers[3], thetas[3]
        res = resultant_in_w(model.coefficient_list(), h.w_poly())
        sq = th.cubic * th.cubic
        c = res.lc() / sq.lc()
        assert c and res == sq.scale(c)

    def test_published_h_resultant_is_square(self):
        res = resultant_in_w(published_model_coeffs(), published_h().w_poly())
        monic = res.scale(1 / res.lc())
        root = monic.sqrt()
        assert root is not None and root.degree == 3

    def test_scaled_h_same_square_class(self):
        h = published_h()
        hs = KummerFunction(0, *(9 * c for c in h.coefficients()))
        # on a degree-zero divisor the scale cancels exactly
        pts = [(Fr(2), Fr(5), 1), (Fr(3), Fr(-1), -1)]
        assert pair(pts, hs) == pair(pts, h)


class TestPair:
    def test_empty_divisor(self):
        assert pair([], published_h()) == 1

    def test_zero_multiplicity_skipped(self):
        h = KummerFunction(0, Fr(1), Fr(0), Fr(0), Fr(0))  # h = t^2
        assert pair([(Fr(0), Fr(7), 0)], h) == 1

    def test_support_collision(self):
        h = KummerFunction(0, Fr(1), Fr(0), Fr(0), Fr(0))
        with pytest.raises(TorsionError, match="move the representative"):
            pair([(Fr(0), Fr(7), 1)], h)

    def test_bilinear(self):
        rng = random.Random(11)
        h = published_h()
        for _ in range(5):
            d1 = [(Fr(rng.randint(1, 30)), Fr(rng.randint(-9, 9)), rng.choice([-2, -1, 1, 2]))
                  for _ in range(3)]
            d2 = [(Fr(rng.randint(1, 30)), Fr(rng.randint(-9, 9)), rng.choice([-1, 1]))
                  for _ in range(2)]
            assert pair(d1 + d2, h) == pair(d1, h) * pair(d2, h)


class TestWeilMatrix:
    def test_shift_parameters_avoid_roots(self):
        cubic = UniPoly((Fr(-6), Fr(11), Fr(-6), Fr(1)))  # roots 1, 2, 3
        assert shift_parameters([cubic], 2) == [Fr(4), Fr(5)]

    def test_matrix_shape_and_symmetry(self, torsion):
        m = torsion[3]
        assert len(m) == 8 and all(len(r) == 8 for r in m)
        for i in range(8):
            assert m[i][i] == 0
            for j in range(8):
                assert m[i][j] == m[j][i]

    def test_golden_matrix_and_rank(self, torsion):
        m = torsion[3]
        assert all(m[i][j] == (0 if i == j else 1)
                   for i in range(8) for j in range(8))
        assert matrix_rank_f2(m) == 8

    def test_rank_helper(self):
        assert matrix_rank_f2([[1, 0], [0, 1]]) == 2
        assert matrix_rank_f2([[1, 1], [1, 1]]) == 1
        assert matrix_rank_f2([[0, 0], [0, 0]]) == 0


class TestModelMembership:
    def test_images_satisfy_model(self, torsion, model):
        # redundant with the construction-time assert, but spelled out
        th = torsion[0][5]
        for b in th.expansion.branches:
            t, w = b.t_image, b.w_image
            val = w * w * w + model.a2(t) * w * w + model.a1(t) * w + model.a0(t)
            assert not val
