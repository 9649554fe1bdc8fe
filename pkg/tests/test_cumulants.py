import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from freecommutant.cumulants import (
    GR_I,
    GR_ONE,
    GR_ZERO,
    CumulantSequence,
    GaussianRational,
    MomentSequence,
    Polynomial,
    cumulant_of_polynomials,
    cumulant_of_word_products,
    cumulants_from_moments,
    kappa_block,
    kappa_pi,
    moments_from_cumulants,
)
from freecommutant.errors import (
    DomainError,
    GroundSetError,
    KindError,
    SizeLimitError,
    TruncationError,
)
from freecommutant.partitions import Partition

STD_S = CumulantSequence.semicircular(1, 10)
FP1 = CumulantSequence.free_poisson(1, 10)
GENERIC_S = CumulantSequence(
    [Fraction(1, 3), 2, Fraction(-1, 2), 1, 0, 2, 1, 1, 2, 1])
GENERIC_X = CumulantSequence(
    [Fraction(1, 2), Fraction(1, 4), 0, Fraction(-1, 16), 3, -2, Fraction(5, 3), 7, 1, 2])

rationals = st.fractions(
    min_value=-4, max_value=4, max_denominator=6)


class TestGaussianRational:
    def test_i_squared(self):
        assert GR_I * GR_I == -GR_ONE

    def test_ring_ops(self):
        a = GaussianRational.of(Fraction(1, 2), 3)
        b = GaussianRational.of(2, Fraction(-1, 3))
        assert a + b == GaussianRational.of(Fraction(5, 2), Fraction(8, 3))
        assert a * b == b * a
        assert (a - a) == GR_ZERO
        assert not GR_ZERO
        assert a.conjugate().conjugate() == a

    @given(rationals, rationals, rationals, rationals)
    def test_multiplication_matches_complex(self, ar, ai, br, bi):
        a = GaussianRational.of(ar, ai)
        b = GaussianRational.of(br, bi)
        prod = a * b
        assert prod.re == ar * br - ai * bi
        assert prod.im == ar * bi + ai * br


class TestSequences:
    def test_semicircular_flag(self):
        assert STD_S.is_semicircular
        assert CumulantSequence.semicircular(Fraction(7, 3), 6).is_semicircular
        assert not FP1.is_semicircular
        assert not GENERIC_S.is_semicircular

    def test_truncation_error(self):
        with pytest.raises(TruncationError):
            STD_S.kappa(11)
        with pytest.raises(TruncationError):
            MomentSequence([1, 2]).moment(2)

    def test_moment_sequence_requires_unit_head(self):
        with pytest.raises(DomainError):
            MomentSequence([2, 1])

    def test_dilated(self):
        assert FP1.dilated(2).values == tuple(Fraction(2) ** k for k in range(1, 11))


class TestMomentCumulantTransforms:
    def test_semicircle_fourth_moment(self):
        # oracle: count the 2 non-crossing pair partitions of 4 points
        m = moments_from_cumulants(STD_S, 6)
        assert [m.moment(k) for k in range(7)] == [1, 0, 1, 0, 2, 0, 5]

    def test_free_poisson_third_moment(self):
        # oracle: |NC(3)| = 5 partitions, each contributing 1
        m = moments_from_cumulants(FP1, 4)
        assert m.moment(3) == 5
        assert m.moment(4) == 14

    def test_point_mass(self):
        m = moments_from_cumulants(CumulantSequence.point_mass(Fraction(3, 2), 5), 5)
        assert m.values == tuple(Fraction(3, 2) ** k for k in range(6))

    def test_catalan_moments_invert_to_all_ones(self):
        k = cumulants_from_moments(MomentSequence([1, 1, 2, 5, 14]), 4)
        assert k == CumulantSequence([1, 1, 1, 1])

    def test_symmetric_bernoulli_kappa4(self):
        # kappa_4 = m_4 - 2 m_2^2 for a centered law
        k = cumulants_from_moments(MomentSequence([1, 0, 1, 0, 1]), 4)
        assert k == CumulantSequence([0, 1, 0, -1])

    def test_point_mass_cumulants(self):
        k = cumulants_from_moments(MomentSequence([1, 1, 1, 1]), 3)
        assert k == CumulantSequence([1, 0, 0])

    @settings(max_examples=60)
    @given(st.lists(rationals, min_size=1, max_size=10))
    def test_round_trip_exact(self, kappas):
        seq = CumulantSequence(kappas)
        n = len(kappas)
        back = cumulants_from_moments(moments_from_cumulants(seq, n), n)
        assert back == seq

    def test_round_trip_to_order_ten(self):
        seq = GENERIC_X
        m = moments_from_cumulants(seq, 10)
        assert cumulants_from_moments(m, 10) == seq


class TestKappaBlock:
    def test_pair_of_s(self):
        assert kappa_block("ss", STD_S, FP1) == 1

    def test_mixed_vanishes(self):
        assert kappa_block("sx", GENERIC_S, GENERIC_X) == 0

    def test_semicircular_kills_triples(self):
        assert kappa_block("sss", STD_S, FP1) == 0

    def test_order_beyond_sequence(self):
        with pytest.raises(TruncationError):
            kappa_block("x" * 11, STD_S, GENERIC_X)


class TestKappaPi:
    def test_nested_pair_product(self):
        pi = Partition(4, [[1, 4], [2, 3]])
        v = Fraction(5, 7)
        dist_x = CumulantSequence([0, v, 0, 0])
        assert kappa_pi(pi, "sxxs", STD_S, dist_x) == v

    def test_mixed_block_vanishes(self):
        pi = Partition(4, [[1, 2], [3, 4]])
        assert kappa_pi(pi, "sxsx", STD_S, FP1) == 0

    def test_crossing_rejected(self):
        with pytest.raises(KindError):
            kappa_pi(Partition(4, [[1, 3], [2, 4]]), "ssss", STD_S, FP1)

    def test_length_mismatch(self):
        with pytest.raises(GroundSetError):
            kappa_pi(Partition(3, [[1, 2, 3]]), "ss", STD_S, FP1)


class TestWordCumulants:
    def test_witness_word_value(self):
        # only one partition survives: pair the outer s's per word boundary
        for s_var, x_var in [(1, 1), (2, 3), (Fraction(1, 2), Fraction(5, 7))]:
            s = CumulantSequence.semicircular(s_var, 8)
            x = CumulantSequence([1, Fraction(x_var), 2, 3, 1, 1, 1, 1])
            got = cumulant_of_word_products(("s", "sx", "xs", "s"), s, x)
            assert got == Fraction(s_var) ** 2 * Fraction(x_var)

    def test_same_order_word_vanishes(self):
        assert cumulant_of_word_products(("s", "sx", "sx", "s"), STD_S, FP1) == 0

    def test_pair_of_two_letter_words(self):
        # semicircular s: the only joining partitions pair the outer s's and
        # put the two x's in one block or two singletons
        s = CumulantSequence.semicircular(Fraction(5, 3), 8)
        got = cumulant_of_word_products(("sx", "xs"), s, GENERIC_X)
        expect = s.kappa(2) * (GENERIC_X.kappa(2) + GENERIC_X.kappa(1) ** 2)
        assert got == expect

    def test_pair_of_two_letter_words_general_s(self):
        # with kappa_1(s) != 0 the two s singletons join through the x pair
        got = cumulant_of_word_products(("sx", "xs"), GENERIC_S, GENERIC_X)
        expect = (GENERIC_S.kappa(2) * (GENERIC_X.kappa(2) + GENERIC_X.kappa(1) ** 2)
                  + GENERIC_S.kappa(1) ** 2 * GENERIC_X.kappa(2))
        assert got == expect

    def test_first_cumulant_of_s(self):
        assert cumulant_of_word_products(("s",), STD_S, FP1) == 0

    def test_letter_cap(self):
        with pytest.raises(SizeLimitError):
            cumulant_of_word_products(("sx",) * 9, STD_S, FP1)

    def test_bad_word_rejected(self):
        with pytest.raises(DomainError):
            cumulant_of_word_products(("sy",), STD_S, FP1)
        with pytest.raises(DomainError):
            cumulant_of_word_products((), STD_S, FP1)

    def test_cache_is_honoured(self):
        cache = {}
        v1 = cumulant_of_word_products(("sx", "xs"), STD_S, FP1, cache=cache)
        assert ("sx", "xs") in cache
        v2 = cumulant_of_word_products(("sx", "xs"), STD_S, FP1, cache=cache)
        assert v1 == v2


def _word_tuples(max_letters):
    pool = ["s", "x", "sx", "xs", "xx", "ss"]
    for m in range(1, 5):
        for tup in itertools.product(pool, repeat=m):
            if sum(len(w) for w in tup) <= max_letters:
                yield tup


class TestPrunedEqualsUnpruned:
    @pytest.mark.parametrize("dists", [
        (STD_S, FP1),
        (GENERIC_S, GENERIC_X),
    ], ids=["semicircular-s", "generic-s"])
    def test_exhaustive_small_tuples(self, dists):
        s, x = dists
        rng = random.Random(11)
        tuples = [t for t in _word_tuples(8)]
        # exhaustive up to 6 letters, sampled beyond (the full set is large)
        selected = [t for t in tuples if sum(map(len, t)) <= 6]
        selected += rng.sample([t for t in tuples if sum(map(len, t)) > 6], 120)
        for tup in selected:
            p = cumulant_of_word_products(tup, s, x, pruned=True)
            u = cumulant_of_word_products(tup, s, x, pruned=False)
            assert p == u, tup


word_tuple = st.lists(
    st.sampled_from(["s", "x", "sx", "xs", "ss", "xx"]),
    min_size=1, max_size=4,
).map(tuple).filter(lambda t: sum(map(len, t)) <= 8)

kappa_list = st.lists(rationals, min_size=8, max_size=8)


class TestPrunedEqualsUnprunedProperty:
    @settings(max_examples=120, deadline=None)
    @given(word_tuple, kappa_list, kappa_list)
    def test_random_distributions(self, tup, ks, kx):
        dist_s = CumulantSequence(ks)
        dist_x = CumulantSequence(kx)
        pruned = cumulant_of_word_products(tup, dist_s, dist_x, pruned=True)
        naive = cumulant_of_word_products(tup, dist_s, dist_x, pruned=False)
        assert pruned == naive


class TestTraciality:
    def test_cyclic_invariance_small_tuples(self):
        rng = random.Random(5)
        tuples = [t for t in _word_tuples(8) if len(t) >= 2]
        for tup in rng.sample(tuples, 200):
            base = cumulant_of_word_products(tup, GENERIC_S, GENERIC_X)
            for r in range(1, len(tup)):
                rotated = tup[r:] + tup[:r]
                assert cumulant_of_word_products(rotated, GENERIC_S, GENERIC_X) == base


small_poly = st.builds(
    lambda pairs, const: Polynomial(
        [(w, GaussianRational.of(re, im)) for (w, re, im) in pairs],
        GaussianRational.of(const),
    ),
    st.lists(st.tuples(st.sampled_from(["s", "x", "sx", "xs"]),
                       rationals, rationals), min_size=1, max_size=2),
    rationals,
)


class TestPolynomial:
    def test_canonical_merge(self):
        p = Polynomial([("sx", GR_ONE), ("sx", GR_ONE), ("s", GR_ZERO)])
        assert p.terms == (("sx", GaussianRational.of(2)),)

    def test_adjoint_reverses_and_conjugates(self):
        p = Polynomial([("sx", GR_I)])
        assert p.adjoint() == Polynomial([("xs", -GR_I)])

    def test_self_adjointness_of_commutator_combination(self):
        p = Polynomial([("sx", GR_I), ("xs", -GR_I)])
        assert p.is_self_adjoint


class TestPolynomialCumulants:
    def test_multilinearity_in_one_slot(self):
        p = Polynomial.from_word("sx")
        q = Polynomial.from_word("x")
        r = Polynomial.from_word("s")
        alpha, beta = GaussianRational.of(Fraction(2, 3)), GaussianRational.of(-2)
        combo = p.scaled(alpha) + q.scaled(beta)
        for slots in ([r], [r, r]):
            direct = cumulant_of_polynomials([combo] + slots, GENERIC_S, GENERIC_X)
            split = (
                alpha * cumulant_of_polynomials([p] + slots, GENERIC_S, GENERIC_X)
                + beta * cumulant_of_polynomials([q] + slots, GENERIC_S, GENERIC_X)
            )
            assert direct == split

    @settings(max_examples=25, deadline=None)
    @given(small_poly, small_poly, rationals, rationals)
    def test_multilinearity_random(self, p, q, a, b):
        ga, gb = GaussianRational.of(a), GaussianRational.of(b)
        combo = p.scaled(ga) + q.scaled(gb)
        slot = Polynomial.from_word("x")
        direct = cumulant_of_polynomials([combo, slot], GENERIC_S, GENERIC_X)
        split = (ga * cumulant_of_polynomials([p, slot], GENERIC_S, GENERIC_X)
                 + gb * cumulant_of_polynomials([q, slot], GENERIC_S, GENERIC_X))
        assert direct == split

    def test_first_cumulant_keeps_constant(self):
        p = Polynomial([("x", GR_ONE)], GaussianRational.of(Fraction(5, 2)))
        got = cumulant_of_polynomials([p], GENERIC_S, GENERIC_X)
        assert got == GaussianRational.of(Fraction(5, 2) + GENERIC_X.kappa(1))

    def test_higher_cumulants_drop_constants(self):
        p = Polynomial([("x", GR_ONE)], GaussianRational.of(7))
        q = Polynomial([("x", GR_ONE)])
        for n in (2, 3):
            assert (cumulant_of_polynomials([p] * n, GENERIC_S, GENERIC_X)
                    == cumulant_of_polynomials([q] * n, GENERIC_S, GENERIC_X))

    def test_empty_slots_rejected(self):
        with pytest.raises(DomainError):
            cumulant_of_polynomials([], GENERIC_S, GENERIC_X)
