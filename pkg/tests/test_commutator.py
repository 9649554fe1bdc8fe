import itertools
from fractions import Fraction

import pytest

from freecommutant.commutator import (
    I_S_X,
    I_X_S,
    AdditivityReport,
    DistributionPair,
    cancellation_sum,
    closed_form_cumulant,
    commutator_polynomial,
    cumulant_sequence_of,
    expansion_cumulant,
    freeness_witness,
    letter_polynomial,
    perturbed_partner,
    sum_with_commutator,
    verify_additivity,
)
from freecommutant.cumulants import (
    GR_I,
    GR_ONE,
    GR_ZERO,
    CumulantSequence,
    GaussianRational,
    MomentSequence,
    Polynomial,
    cumulant_of_word_products,
    cumulants_from_moments,
)
from freecommutant.errors import DomainError, SizeLimitError

STD_S = CumulantSequence.semicircular(1, 8)
FP1 = CumulantSequence.free_poisson(1, 8)


def bernoulli_half():
    return cumulants_from_moments(MomentSequence([1] + [Fraction(1, 2)] * 8), 8)


def atomic_third():
    moments = [1] + [Fraction(1, 3) * (-1) ** k + Fraction(2, 3) * 2 ** k for k in range(1, 9)]
    return cumulants_from_moments(MomentSequence(moments), 8)


class TestCommutatorPolynomial:
    def test_definition(self):
        assert commutator_polynomial(I_S_X) == Polynomial([("sx", GR_I), ("xs", -GR_I)])
        assert commutator_polynomial(I_X_S) == Polynomial([("xs", GR_I), ("sx", -GR_I)])

    def test_self_adjoint(self):
        assert commutator_polynomial(I_S_X).is_self_adjoint
        assert commutator_polynomial(I_X_S).is_self_adjoint

    def test_unknown_tag(self):
        with pytest.raises(DomainError):
            commutator_polynomial("i[y,z]")


class TestCumulantSequenceOf:
    def test_commutator_variance_is_twice_product(self):
        pair = DistributionPair.standard(FP1, 1, 4)
        seq = cumulant_sequence_of(commutator_polynomial(I_S_X), pair, 4)
        assert seq.kappa(2) == 2  # 2 * kappa_2(s) * kappa_2(x)

    def test_odd_commutator_cumulants_vanish(self):
        # the law of i[s,x] is symmetric because s and -s agree in law
        for x in (FP1, atomic_third()):
            pair = DistributionPair.standard(x, 1, 7)
            seq = cumulant_sequence_of(commutator_polynomial(I_S_X), pair, 7)
            assert all(seq.kappa(n) == 0 for n in (1, 3, 5, 7))

    def test_plain_letter_recovers_inputs(self):
        pair = DistributionPair.standard(atomic_third(), 1, 6)
        seq = cumulant_sequence_of(letter_polynomial("s"), pair, 6)
        assert seq.values == pair.dist_s.values[:6]
        seq_x = cumulant_sequence_of(letter_polynomial("x"), pair, 6)
        assert seq_x.values == pair.dist_x.values[:6]

    def test_order_cap(self):
        pair = DistributionPair.standard(FP1, 1, 8)
        with pytest.raises(SizeLimitError):
            cumulant_sequence_of(letter_polynomial("s"), pair, 9)

    def test_imaginary_parts_vanish_for_self_adjoint_suite(self):
        pair = DistributionPair(GENERIC_S := CumulantSequence(
            [Fraction(1, 3), 2, Fraction(-1, 2), 1, 0, 2], ), CumulantSequence(
            [Fraction(1, 2), Fraction(1, 4), 0, Fraction(-1, 16), 3, -2]), 6)
        for p in (letter_polynomial("s"), letter_polynomial("x"),
                  commutator_polynomial(I_S_X), perturbed_partner()):
            # raises EngineConsistencyError if any imaginary part survives
            cumulant_sequence_of(p, pair, 6)


class TestAdditivity:
    def test_bernoulli_all_hold_to_six(self):
        pair = DistributionPair.standard(bernoulli_half(), 1, 6)
        reports = verify_additivity(pair, 6)
        assert all(r.holds for r in reports)
        assert all(r.hypothesis_met for r in reports)

    def test_point_mass_is_degenerate(self):
        pair = DistributionPair.standard(CumulantSequence.point_mass(5, 6), 1, 6)
        reports = verify_additivity(pair, 6)
        assert all(r.holds for r in reports)
        assert all(r.rhs_c == 0 for r in reports)

    def test_free_poisson_second_order_split(self):
        pair = DistributionPair.standard(FP1, 1, 2)
        report = verify_additivity(pair, 2)[1]
        assert (report.lhs, report.rhs_s, report.rhs_c) == (3, 1, 2)

    def test_exploratory_mode_flags_hypothesis(self):
        quartic_s = CumulantSequence([0, 1, 0, 1, 0, 0], )
        pair = DistributionPair(quartic_s, FP1, 4)
        reports = verify_additivity(pair, 4)
        assert all(not r.hypothesis_met for r in reports)

    def test_exploratory_mode_detects_failures(self):
        # negative control: a free Poisson in place of the semicircular
        # element breaks the comparison at third order, so the verdicts
        # are not vacuous
        pair = DistributionPair(FP1, FP1, 4)
        reports = verify_additivity(pair, 4)
        assert reports[0].holds and reports[1].holds
        assert not reports[2].holds
        assert all(not r.hypothesis_met for r in reports)

    def test_report_json_shape(self):
        r = AdditivityReport(2, Fraction(3), Fraction(1), Fraction(2))
        assert r.to_json() == {"n": 2, "lhs": "3", "rhs_s": "1", "rhs_c": "2", "holds": True}


class TestFreenessWitness:
    def test_standard_poisson(self):
        assert freeness_witness(DistributionPair.standard(FP1, 1, 4)) == 1

    def test_scalar_x_gives_zero(self):
        pair = DistributionPair.standard(CumulantSequence.point_mass(3, 4), 1, 4)
        assert freeness_witness(pair) == 0

    def test_variances_multiply(self):
        x = CumulantSequence([0, 3, 0, 0])
        pair = DistributionPair(CumulantSequence.semicircular(2, 4), x, 4)
        assert freeness_witness(pair) == 12

    def test_positive_whenever_variances_are(self):
        for x in (bernoulli_half(), FP1, atomic_third()):
            for s_var in (1, 2, Fraction(1, 3)):
                pair = DistributionPair(CumulantSequence.semicircular(s_var, 8), x, 4)
                assert freeness_witness(pair) == Fraction(s_var) ** 2 * x.kappa(2) > 0

    def test_scaling_in_x_is_quadratic(self):
        base = DistributionPair.standard(FP1, 1, 4)
        w0 = freeness_witness(base)
        for c in (2, -1, Fraction(1, 3)):
            scaled = DistributionPair.standard(FP1.dilated(c), 1, 4)
            assert freeness_witness(scaled) == Fraction(c) ** 2 * w0


class TestCancellation:
    def test_poisson_examples(self):
        pair = DistributionPair.standard(FP1, 1, 8)
        assert not cancellation_sum(4, 2, pair)
        assert not cancellation_sum(3, 1, pair)

    def test_two_one_by_hand(self):
        # the four summands cancel in adjacent pairs
        x = CumulantSequence([1, 1, 1, 1])
        pair = DistributionPair.standard(x, 1, 4)
        assert not cancellation_sum(2, 1, pair)

    def test_all_small_orders_vanish(self):
        pair = DistributionPair.standard(atomic_third(), 1, 8)
        cache = {}
        for n in range(2, 6):
            for k in range(1, n):
                assert not cancellation_sum(n, k, pair, cache=cache)

    def test_requires_semicircular_s(self):
        pair = DistributionPair(CumulantSequence([1, 1, 1, 1]), FP1, 4)
        with pytest.raises(DomainError):
            cancellation_sum(3, 1, pair)

    def test_bad_k(self):
        pair = DistributionPair.standard(FP1, 1, 4)
        with pytest.raises(DomainError):
            cancellation_sum(3, 3, pair)

    def test_returns_gaussian_rational(self):
        pair = DistributionPair.standard(FP1, 1, 4)
        value = cancellation_sum(2, 1, pair)
        assert isinstance(value, GaussianRational)
        assert value.is_real


class TestClosedForm:
    def test_first_order_is_bare_cumulant(self):
        # oracle: no interval partition of {1} has all blocks of size >= 2
        assert closed_form_cumulant(1, FP1) == FP1.kappa(1)

    def test_second_order_triples_the_variance(self):
        for x in (FP1, bernoulli_half(), atomic_third()):
            assert closed_form_cumulant(2, x) == 3 * x.kappa(2)
            assert expansion_cumulant(2, x, 1) == 3 * x.kappa(2)

    def test_third_order_quadruples(self):
        for x in (FP1, atomic_third()):
            assert closed_form_cumulant(3, x) == 4 * x.kappa(3)

    def test_fourth_order_poisson(self):
        # oracle value from the full expansion: 7*kappa_4 + 2*kappa_2^2 = 9
        assert expansion_cumulant(4, FP1, 1) == 9
        assert closed_form_cumulant(4, FP1) == 9

    def test_matches_expansion_through_six(self):
        for x in (FP1, bernoulli_half(), CumulantSequence.semicircular(1, 8)):
            cache = {}
            for n in range(1, 7):
                assert closed_form_cumulant(n, x) == expansion_cumulant(n, x, 1, cache=cache)

    def test_general_variance_second_order(self):
        for t in (1, 2, Fraction(1, 3)):
            got = expansion_cumulant(2, FP1, t)
            assert got == FP1.kappa(2) * (1 + 2 * Fraction(t))

    def test_commutator_scaling_in_x(self):
        pair = DistributionPair.standard(FP1, 1, 6)
        base = cumulant_sequence_of(commutator_polynomial(I_S_X), pair, 6)
        for c in (2, -1, Fraction(1, 3)):
            scaled_pair = DistributionPair.standard(FP1.dilated(c), 1, 6)
            scaled = cumulant_sequence_of(commutator_polynomial(I_S_X), scaled_pair, 6)
            for n in range(1, 7):
                assert scaled.kappa(n) == Fraction(c) ** n * base.kappa(n)

    def test_sum_with_commutator_polynomials(self):
        assert sum_with_commutator() == (
            Polynomial([("s", GaussianRational.of(1)),
                        ("sx", GR_I), ("xs", -GR_I)]))
        assert perturbed_partner().is_self_adjoint


class TestClosedFormRegressionTable:
    # frozen after verifying each entry against the expansion oracle
    TABLE = {
        "bernoulli": ["1/2", "3/4", "0", "-5/16", "0", "13/32", "0", "-157/256"],
        "free-poisson": ["1", "3", "4", "9", "16", "35", "71", "157"],
        "semicircle": ["0", "3", "0", "2", "0", "2", "0", "2"],
        "atomic-third": ["1", "6", "-8", "-6", "90", "-128", "-798", "3834"],
    }

    def dists(self):
        return {
            "bernoulli": bernoulli_half(),
            "free-poisson": FP1,
            "semicircle": CumulantSequence.semicircular(1, 8),
            "atomic-third": atomic_third(),
        }

    def test_table(self):
        for name, dist in self.dists().items():
            got = [str(closed_form_cumulant(n, dist)) for n in range(1, 9)]
            assert got == self.TABLE[name], name


class TestMomentRouteCrossCheck:
    """Third route to the cumulant sequences: raw moments of the polynomial
    by summing traces of concatenated words (the join condition is vacuous
    for a single word), then inverting the moment-cumulant relation."""

    @staticmethod
    def moments_by_trace(p, order, pair, cache):
        values = [Fraction(1)]
        for n in range(1, order + 1):
            total = GR_ZERO
            for choice in itertools.product(p.terms, repeat=n):
                coeff = GR_ONE
                for _w, c in choice:
                    coeff = coeff * c
                word = "".join(w for w, _c in choice)
                total = total + coeff * cumulant_of_word_products(
                    (word,), pair.dist_s, pair.dist_x, cache=cache)
            assert total.is_real
            values.append(total.re)
        return MomentSequence(values)

    @pytest.mark.parametrize("poly", [
        commutator_polynomial(I_S_X),
        sum_with_commutator(),
        perturbed_partner(),
    ], ids=["i[s,x]", "s+i[s,x]", "x+i[x,s]"])
    def test_trace_moments_invert_to_engine_cumulants(self, poly):
        for dist_x in (FP1, bernoulli_half()):
            pair = DistributionPair.standard(dist_x, 1, 6)
            cache = {}
            m = self.moments_by_trace(poly, 6, pair, cache)
            assert cumulants_from_moments(m, 6) == cumulant_sequence_of(poly, pair, 6)
