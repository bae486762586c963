import random
from fractions import Fraction as Fr

import pytest
import sympy

from classrank.algebra import UniPoly
from classrank.algebra.numutil import real_root_intervals, refine_root_interval
from classrank.algebra.padic import valuation, root_valuations
from classrank.branchcurve import INFINITE_PARAM, build_trigonal_model, \
    model_from_coefficients
from classrank.delpezzo import ProjPoint, build_del_pezzo
from classrank.twotorsion import KummerFunction, torsion_basis_data
from classrank import localbounds as lb

from paperdata import DEMO_POINTS, PAPER_PRIMES, PAPER_TABLE, \
    cube_root_model, demo_points, published_h, published_model


def h_shift_w():
    # h = 1 + W
    return KummerFunction(0, Fr(0), Fr(0), Fr(1), Fr(1))


@pytest.fixture(scope="module")
def demo():
    dp = build_del_pezzo(demo_points())
    model = build_trigonal_model(dp)
    _, _, kummers, _ = torsion_basis_data(dp, model)
    hs = [h.normalized_function() for h in kummers]
    return dp, model, hs


class TestBadPrimes:
    def test_paper_set(self):
        assert lb.candidate_bad_primes(demo_points()) == PAPER_PRIMES

    def test_prime_bound_is_inert(self):
        assert lb.candidate_bad_primes(demo_points(), 10) == PAPER_PRIMES

    def test_determinants_match_independent_evaluation(self):
        # cross-check det_bareiss against sympy on a small configuration
        pts = [ProjPoint.of_fractions(*p) for p in
               [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (1, 2, 3),
                (2, 5, 1), (3, 1, 2), (5, 3, 7)]]
        dets = lb.general_position_determinants(pts)
        reps = [lb.integral_representative(p) for p in pts]
        from itertools import combinations
        expected = [int(sympy.Matrix([reps[i] for i in t]).det())
                    for t in combinations(range(8), 3)]
        assert dets[:56] == expected

    def test_congruent_points_flag_the_prime(self):
        pts = [ProjPoint.of_fractions(*p) for p in DEMO_POINTS[:7]]
        # (7, 5, 1) reduces to (0, -2, 1) mod 7
        pts.append(ProjPoint.of_fractions(7, 5, 1))
        assert 7 in lb.candidate_bad_primes(pts)

    def test_degenerate_configuration_rejected(self):
        pts = [ProjPoint.of_fractions(*p) for p in
               [(0, 0, 1), (1, 1, 1), (2, 2, 1), (1, 0, 1), (0, 1, 1),
                (1, 2, 1), (2, 1, 1), (3, 5, 1)]]
        with pytest.raises(lb.BoundsError, match="general position"):
            lb.candidate_bad_primes(pts)

    def test_needs_eight_points(self):
        with pytest.raises(lb.BoundsError):
            lb.general_position_determinants(demo_points()[:5])

    def test_integral_representative(self):
        p = ProjPoint.of_fractions(Fr(1, 2), Fr(3, 4), 1)
        assert lb.integral_representative(p) == [2, 3, 4]
        q = ProjPoint.of_fractions(0, -2, 1)
        assert lb.integral_representative(q) == [0, -2, 1]


class TestLambda:
    def test_linear_term(self):
        h = KummerFunction(0, Fr(0), Fr(1), Fr(0), Fr(1))
        assert lb.lambda_at_place([h], 5) == 1

    def test_halves_at_two(self):
        h = KummerFunction(0, Fr(1, 16), Fr(4), Fr(1), Fr(1))
        assert lb.lambda_at_place([h], 2) == 7

    def test_integral_coefficients_odd_prime(self):
        h = KummerFunction(0, Fr(3), Fr(-7), Fr(2), Fr(1))
        assert lb.lambda_at_place([h], 13) == 1

    def test_unnormalized_rejected(self):
        h = KummerFunction(0, Fr(1), Fr(1), Fr(1), Fr(2))
        with pytest.raises(lb.BoundsError, match="normalized"):
            lb.lambda_at_place([h], 5)

    def test_infinite_place_radius(self):
        h = KummerFunction(0, Fr(0), Fr(1), Fr(0), Fr(1))
        assert lb.lambda_at_place([h], INFINITE_PARAM) == Fr(1, 2)
        hid = KummerFunction(0, Fr(0), Fr(0), Fr(0), Fr(1))
        assert lb.lambda_at_place([hid], INFINITE_PARAM) == 1

    def test_infinite_place_box_property(self):
        rng = random.Random(5)
        hs = [KummerFunction(i, Fr(rng.randint(-50, 50)),
                             Fr(rng.randint(-50, 50)),
                             Fr(rng.randint(-50, 50)), Fr(1))
              for i in range(4)]
        r = lb.lambda_at_place(hs, INFINITE_PARAM)
        assert r > 0
        for _ in range(50):
            t = r * Fr(rng.randint(-1000, 1000), 1000)
            w = r * Fr(rng.randint(-1000, 1000), 1000)
            for h in hs:
                assert abs(h(t, w) - 1) <= Fr(1, 2)


class TestEllFinite:
    def test_cube_root_model(self):
        assert lb.ell_at_finite_place(cube_root_model(), 2, 7) == 6
        assert lb.ell_at_finite_place(cube_root_model(), 5, 2) == 15

    def test_requires_totally_ramified_zero_fibre(self):
        bad = model_from_coefficients(UniPoly(()), UniPoly((Fr(1),)),
                                      UniPoly((Fr(0), Fr(1))))
        with pytest.raises(lb.BoundsError, match="totally ramified"):
            lb.ell_at_finite_place(bad, 1, 5)

    def test_returned_exponent_verifies(self, demo):
        _, model, hs = demo
        for p in (2, 3, 17):
            m = lb.lambda_at_place(hs, p)
            k = lb.ell_at_finite_place(model, m, p)
            assert k >= m
            assert lb.verify_sufficiency(model, hs, p, k).passed


class TestVerifySufficiency:
    def test_paper_table_rows(self):
        model, hs = published_model(), [published_h()]
        for p, k in PAPER_TABLE:
            trace = lb.verify_sufficiency(model, hs, p, k)
            assert trace.passed, (p, k)
            assert trace.verdict() == "PASS"

    def test_insufficient_exponent_fails(self):
        trace = lb.verify_sufficiency(published_model(), [published_h()], 3, 0)
        assert not trace.passed
        assert trace.verdict() == "FAIL"

    def test_cube_root_rule(self):
        model, hs = cube_root_model(), [h_shift_w()]
        for m in (1, 2, 3, 4):
            assert lb.verify_sufficiency(model, hs, 5, 3 * m).passed
        for m in (3, 4, 5):
            assert lb.verify_sufficiency(model, hs, 2, 3 * m).passed
        # at p = 2 a bare first power leaves |h - 1| = 1/2 > |8|
        assert not lb.verify_sufficiency(model, hs, 2, 3).passed

    def test_monotone_in_exponent(self):
        model, hs = published_model(), [published_h()]
        for p, k in ((3, 21), (17, 1), (2, 33)):
            for extra in (1, 2, 7):
                assert lb.verify_sufficiency(model, hs, p, k + extra).passed

    def test_trace_margins(self):
        model, hs = published_model(), [published_h()]
        trace = lb.verify_sufficiency(model, hs, 3, 21)
        assert len(trace.margins) == 1
        assert trace.margins[0][1] > 0
        assert trace.root_valuation > 0

    def test_finite_place_soundness_sampling(self):
        # exact fibre polygons at sampled t agree with the symbolic floor
        model, hs = published_model(), [published_h()]
        rng = random.Random(17)
        for p in (2, 3, 17):
            m = lb.lambda_at_place(hs, p)
            k = lb.ell_at_finite_place(model, m, p)
            floor = lb._root_valuation_floor(model, p, k)
            assert floor >= m
            for _ in range(100):
                extra = rng.choice((0, 0, 0, 1, 2))
                n = rng.randint(1, 10 ** 6)
                while n % p == 0:
                    n += 1
                d = rng.randint(1, 10 ** 6)
                while d % p == 0:
                    d += 1
                t = Fr(n * p ** (k + extra), d) * rng.choice((1, -1))
                pts = [(3, Fr(0))]
                for j, a in enumerate((model.a0, model.a1, model.a2)):
                    val = a(t)
                    if val:
                        pts.append((j, valuation(val, p)))
                sampled = root_valuations(pts)[-1][0]
                assert sampled >= floor >= m


class TestEllInfinity:
    def test_cube_root_model(self):
        radius = lb.ell_at_infinity(cube_root_model(), [h_shift_w()])
        assert radius == Fr(1, 16)
        assert radius < Fr(1, 8)

    def test_trivial_h(self):
        hid = KummerFunction(0, Fr(0), Fr(0), Fr(0), Fr(1))
        assert lb.ell_at_infinity(cube_root_model(), [hid]) == 1

    def test_real_soundness_sampling(self):
        model, h = published_model(), published_h()
        radius = lb.ell_at_infinity(model, [h])
        assert radius > 0
        rng = random.Random(23)
        for _ in range(100):
            t = radius * Fr(rng.randint(-999, 999), 1000)
            cubic = model.fibre_cubic(t)
            for lo, hi in real_root_intervals(cubic):
                width = Fr(1, 2)
                for _ in range(80):
                    lo, hi = refine_root_interval(cubic, lo, hi, width)
                    vals = (abs(h(t, lo) - 1), abs(h(t, hi) - 1))
                    if max(vals) < 1:
                        break
                    width /= 2 ** 8
                else:
                    pytest.fail("h strayed from 1 near a real fibre point")
                assert h(t, lo) > 0 and h(t, hi) > 0


class TestProfile:
    def test_demo_profile(self, demo):
        dp, model, hs = demo
        prof = lb.admissibility_profile(dp.points, model, hs)
        assert prof.places() == PAPER_PRIMES
        assert all(k >= 1 for k in prof.finite_places.values())
        assert 0 < prof.archimedean_bound <= Fr(1, 2)
        assert set(prof.provenance) == set(PAPER_PRIMES) | {INFINITE_PARAM}

    def test_demo_profile_goldens(self, demo):
        dp, model, hs = demo
        prof = lb.admissibility_profile(dp.points, model, hs)
        assert prof.finite_places[2] == 47
        assert prof.finite_places[3] == 31
        assert prof.finite_places[17] == 3
        assert prof.archimedean_bound == Fr(1, 8192)
