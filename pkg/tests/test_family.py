import random
from fractions import Fraction as Fr
from math import gcd

import pytest

from classrank.algebra import UniPoly, padic_splitting, valuation
from classrank.algebra.numutil import is_irreducible
from classrank.branchcurve import build_trigonal_model, model_from_coefficients
from classrank.delpezzo import build_del_pezzo
from classrank.localbounds import AdmissibilityProfile, admissibility_profile, \
    ell_at_infinity
from classrank.twotorsion import KummerFunction, torsion_basis_data
from classrank import family as fam

from paperdata import PAPER_PRIMES, PAPER_TABLE, cube_root_model, demo_points, \
    published_h, published_model


@pytest.fixture(scope="module")
def demo():
    pts = demo_points()
    dp = build_del_pezzo(pts)
    model = build_trigonal_model(dp)
    _, _, kummers, _ = torsion_basis_data(dp, model)
    hs = [h.normalized_function() for h in kummers]
    profile = admissibility_profile(pts, model, hs)
    return model, kummers, profile


def tiny_profile(places, bound):
    return AdmissibilityProfile(dict(places), Fr(*bound), {})


class TestEnumerate:
    def test_smallest_heights(self):
        prof = tiny_profile({2: 1}, (1, 3))
        assert fam.enumerate_admissible(prof, 2) == [Fr(2, 7), Fr(2, 9)]

    def test_negative_strategy_mirrors(self):
        prof = tiny_profile({2: 1}, (1, 3))
        neg = fam.enumerate_admissible(prof, 4, "negative")
        assert neg == [-t for t in fam.enumerate_admissible(prof, 4)]

    def test_zero_never_appears(self):
        prof = tiny_profile({3: 2}, (1, 2))
        assert all(t for t in fam.enumerate_admissible(prof, 10))

    def test_count_zero(self):
        assert fam.enumerate_admissible(tiny_profile({2: 1}, (1, 3)), 0) == []

    def test_unknown_strategy(self):
        with pytest.raises(fam.FamilyError, match="strategy"):
            fam.enumerate_admissible(tiny_profile({2: 1}, (1, 3)), 1, "random")

    def test_constraints_recheck_by_valuation(self):
        prof = tiny_profile({2: 3, 5: 2}, (1, 4))
        for t in fam.enumerate_admissible(prof, 25):
            assert valuation(t, 2) >= 3
            assert valuation(t, 5) >= 2
            assert abs(t) < Fr(1, 4)
            for p in (2, 5):
                assert t.denominator % p

    def test_heights_never_decrease(self):
        prof = tiny_profile({2: 2}, (1, 2))
        ts = fam.enumerate_admissible(prof, 30)
        dens = [t.denominator for t in ts]
        assert dens == sorted(dens)
        assert len(set(ts)) == 30

    def test_paper_profile_structure(self):
        radius = ell_at_infinity(published_model(), [published_h()])
        prof = AdmissibilityProfile(dict(PAPER_TABLE), radius, {})
        t = fam.enumerate_admissible(prof, 1)[0]
        M = 1
        for p, k in PAPER_TABLE:
            M *= p ** k
        assert t.numerator % M == 0
        assert t.denominator > M
        assert gcd(t.denominator, M) == 1


class TestFibreField:
    def test_constant_cube_root_fibre(self):
        model = model_from_coefficients(UniPoly(()), UniPoly(()),
                                        UniPoly((Fr(-2),)))
        K = fam.fibre_field(model, 1)
        assert K.cubic == UniPoly((Fr(-2), Fr(0), Fr(0), Fr(1)))
        assert K.discriminant == -108
        assert K.real_embeddings == 1

    def test_totally_real_signature(self):
        model = model_from_coefficients(UniPoly(()), UniPoly((Fr(-3),)),
                                        UniPoly((Fr(1),)))
        K = fam.fibre_field(model, 7)
        assert K.discriminant == 81
        assert K.real_embeddings == 3

    def test_vanishing_a0_is_exceptional(self):
        with pytest.raises(fam.HilbertExceptionalError) as info:
            fam.fibre_field(cube_root_model(), 0)
        assert info.value.t == 0

    def test_rational_cube_is_exceptional(self):
        with pytest.raises(fam.HilbertExceptionalError, match="root 2"):
            fam.fibre_field(cube_root_model(), 8)

    def test_paper_model_first_admissible_t(self):
        model = published_model()
        radius = ell_at_infinity(model, [published_h()])
        prof = AdmissibilityProfile(dict(PAPER_TABLE), radius, {})
        t = fam.enumerate_admissible(prof, 1)[0]
        K = fam.fibre_field(model, t)
        assert is_irreducible(K.cubic)
        assert K.real_embeddings in (1, 3)


class TestPlaceOrders:
    def test_norm_identity(self):
        # sum of f_w * ord_w over the places w | p must equal the valuation
        # of the norm gamma^3 * f(-c/gamma)
        rng = random.Random(11)
        checked = 0
        while checked < 120:
            f = UniPoly(tuple(Fr(rng.randint(-30, 30), rng.choice([1, 2, 3]))
                              for _ in range(3)) + (Fr(1),))
            if f.degree != 3 or not is_irreducible(f):
                continue
            p = rng.choice([2, 3, 5, 7])
            g = Fr(rng.randint(-20, 20), rng.choice([1, 2, 5]))
            c = Fr(rng.randint(-20, 20), rng.choice([1, 3, 4]))
            if not g and not c:
                continue
            places = padic_splitting(f, p)
            ords = fam._place_orders(f, places, p, g, c)
            norm = g ** 3 * f(-c / g) if g else c ** 3
            assert sum(fd * o for _, fd, o in ords) == valuation(norm, p)
            checked += 1

    def test_zero_rejected(self):
        f = UniPoly.from_ints([-2, 0, 0, 1])
        with pytest.raises(fam.FamilyError):
            fam._place_orders(f, padic_splitting(f, 2), 2, Fr(0), Fr(0))


class TestCertify:
    # model with fibre W^3 - t; h = 1 + t/25 is a unit square at 5 exactly
    # when v_5(t) >= 2
    def setup_method(self):
        self.model = cube_root_model()
        self.prof = tiny_profile({5: 2}, (1, 2))
        self.h = KummerFunction(0, Fr(0), Fr(1, 25), Fr(0), Fr(1))

    def test_admissible_t_passes(self):
        cert = fam.certify(self.model, [self.h], self.prof, Fr(25, 51))
        assert cert.overall == "PASS"
        assert [(pc.e, pc.f, pc.order) for pc in cert.parity_checks] == [(3, 1, 0)]
        assert all(sc.positive for sc in cert.sign_checks)

    def test_profile_violation_fails_and_is_recorded(self):
        cert = fam.certify(self.model, [self.h], self.prof, Fr(5, 7))
        assert cert.overall == "FAIL"
        bad = [pc for pc in cert.parity_checks if not pc.passed]
        assert bad and bad[0].prime == 5 and bad[0].order % 2 == 1

    def test_constant_h_trivially_passes(self):
        one = KummerFunction(0, Fr(0), Fr(0), Fr(0), Fr(1))
        cert = fam.certify(self.model, [one], self.prof, Fr(25, 51))
        assert cert.overall == "PASS"
        assert cert.independence_rank == 0
        assert cert.independence == "INCONCLUSIVE-INDEPENDENCE"

    def test_base_point_collision(self):
        collide = KummerFunction(3, Fr(1), Fr(1), Fr(1), Fr(0))
        with pytest.raises(fam.FamilyError, match="representative"):
            fam.certify(self.model, [collide], self.prof, Fr(25, 51))

    def test_negative_fibre_fails_sign_check(self):
        h = KummerFunction(0, Fr(0), Fr(0), Fr(1), Fr(1))
        cert = fam.certify(self.model, [h], tiny_profile({5: 1}, (9, 1)),
                           Fr(-40, 7))
        assert cert.overall == "FAIL"
        assert [sc.positive for sc in cert.sign_checks] == [False]

    def test_verdicts_stable_under_rerun(self):
        first = fam.certify(self.model, [self.h], self.prof, Fr(25, 51))
        second = fam.certify(self.model, [self.h], self.prof, Fr(25, 51))
        assert first == second

    def test_overall_iff_all_checks(self):
        for t in (Fr(25, 51), Fr(5, 7)):
            cert = fam.certify(self.model, [self.h], self.prof, t)
            ok = all(pc.passed for pc in cert.parity_checks) and \
                all(sc.passed for sc in cert.sign_checks)
            assert cert.overall == ("PASS" if ok else "FAIL")


class TestIndependence:
    def field(self):
        return fam.fibre_field(cube_root_model(), Fr(25, 51))

    def test_all_ones_rank_zero(self):
        ev = fam.independence_rank(self.field(), [(Fr(0), Fr(1))] * 8, [5], 4)
        assert ev.rank == 0

    def test_distinct_primes_rank_eight(self):
        primes = [2, 3, 5, 7, 11, 13, 17, 19]
        xs = [(Fr(0), Fr(p)) for p in primes]
        ev = fam.independence_rank(self.field(), xs, primes, budget=0)
        assert ev.rank == 8
        assert ev.aux_primes == ()

    def test_budget_monotone(self):
        K = fam.fibre_field(cube_root_model(), Fr(2, 7))
        xs = [(Fr(1), Fr(3)), (Fr(2), Fr(1)), (Fr(1), Fr(-1)), (Fr(0), Fr(6))]
        ranks = [fam.independence_rank(K, xs, [2, 3, 7], budget=b).rank
                 for b in range(7)]
        assert ranks == sorted(ranks)

    def test_split_place_parities_collapse_to_norm_parity(self):
        # 2 splits completely in x^3 - x^2 - 2x - 8 and the three degree-one
        # places cannot be told apart exactly, so the three parity bits
        # collapse to their sum: theta has root valuations 2, 1, 0 (odd sum),
        # 2*theta has 3, 2, 1 (even sum)
        f = UniPoly.from_ints([-8, -2, -1, 1])
        K = fam.CubicField(f, int(f.discriminant()), 1)
        ev = fam.independence_rank(K, [(Fr(1), Fr(0)), (Fr(2), Fr(0))], [2], 0)
        assert ev.rows == ((1, 0), (0, 0))
        assert ev.rank == 1

    def test_aux_primes_split_and_avoid_bad_set(self):
        K = self.field()
        xs = [(Fr(1), Fr(2)), (Fr(1), Fr(-3))]
        ev = fam.independence_rank(K, xs, [3, 5], budget=5)
        assert len(ev.aux_primes) == 5
        assert list(ev.aux_primes) == sorted(ev.aux_primes)
        for q in ev.aux_primes:
            assert q not in (3, 5)
            assert len(padic_splitting(K.cubic, q)) == 3


class TestPipeline:
    def test_demo_certificate(self, demo):
        model, kummers, profile = demo
        ts = fam.enumerate_admissible(profile, 3)
        M = 1
        for p, k in profile.finite_places.items():
            M *= p ** k
        for t in ts:
            assert t.numerator % M == 0
            assert gcd(t.denominator, M) == 1
            assert abs(t) < profile.archimedean_bound
        cert = fam.certify(model, kummers, profile, ts[0])
        assert cert.overall == "PASS"
        assert all(pc.passed for pc in cert.parity_checks)
        assert len(cert.sign_checks) == 8 * cert.field.real_embeddings
        assert cert.independence_rank == 8
        assert cert.independence == "CONFIRMED"
        # every bad prime is covered and its places account for the cubic
        for p in PAPER_PRIMES:
            degs = {(pc.place, pc.e, pc.f) for pc in cert.parity_checks
                    if pc.prime == p}
            assert sum(e * f for _, e, f in degs) == 3

    def test_demo_first_fibre_is_irreducible(self, demo):
        model, _, profile = demo
        t = fam.enumerate_admissible(profile, 1)[0]
        K = fam.fibre_field(model, t)
        assert is_irreducible(K.cubic)
        assert K.discriminant.bit_length() > 10000
