import math
from fractions import Fraction

import pytest

from legendre.config import config
from legendre.constants import (
    ACCELERATED,
    RIGOROUS,
    BetaFSummand,
    BetaSummand,
    CSummand,
    beta_f,
    beta_f_upper_bound,
    choose_cutoff,
    constant_beta,
    constant_C,
    evaluate_constant,
    minus_zeta_prime_2,
    partial_sum,
    summand_partial_sums,
)
from legendre.errors import BudgetExceeded, DomainError, Unsupported, VerificationFailed
from legendre.fmap import FMap, LinearCertificate
from legendre.primes import primes_up_to

PRINTED_C = Fraction('1.2269688')
PRINTED_BETA = Fraction('1.0676431')


class TestSummands:
    def test_coefficients(self):
        assert CSummand().coefficient(3) == Fraction(1, 4)
        assert BetaSummand().coefficient(2) == 0
        assert BetaSummand().coefficient(3) == Fraction(1, 2)
        shifted = BetaFSummand(FMap.shifted_linear(1, -1), LinearCertificate(1, Fraction(2)))
        assert shifted.coefficient(2) == 1
        assert shifted.coefficient(5) == Fraction(1, 16)

    def test_three_term_partial_sum(self):
        value = partial_sum(CSummand(), [2, 3, 5])
        assert Fraction('1.0683') < value.lo <= value.hi < Fraction('1.0685')
        assert value.hi < PRINTED_C

    def test_cutoff_is_smallest_within_budget(self):
        summand = CSummand()
        cutoff = choose_cutoff(summand, 1e-3)
        assert summand.tail_estimate(cutoff) <= 1e-3
        assert summand.tail_estimate(cutoff - 1) > 1e-3

    def test_partial_sums_increase_towards_C(self):
        sums = summand_partial_sums(CSummand(), [10, 100, 1000, 10000])
        assert all(a.hi < b.lo for a, b in zip(sums, sums[1:]))
        assert sums[-1].hi < PRINTED_C

    def test_block_order_does_not_depend_on_workers(self):
        config.block_size = 100
        primes = primes_up_to(5000).tolist()
        assert partial_sum(CSummand(), primes, threads=2) == partial_sum(CSummand(), primes, threads=1)


class TestRigorous:
    def test_C_coarse(self):
        result = constant_C(1e-2, RIGOROUS)
        assert result.value.contains(PRINTED_C)
        assert result.value.width <= Fraction(1, 100)
        assert result.mode == RIGOROUS
        assert result.tail_bound.hi <= Fraction(1e-2) / 2

    def test_beta_coarse(self):
        result = constant_beta(1e-2, RIGOROUS)
        assert result.value.contains(PRINTED_BETA)

    def test_identity_beta_f_is_zero(self):
        result = beta_f(FMap.identity(), LinearCertificate(1, Fraction(0)), 1e-9)
        assert result.value.lo == result.value.hi == 0

    def test_shifted_primes_give_C(self):
        shifted = beta_f(FMap.shifted_linear(1, -1), LinearCertificate(1, Fraction(2)), 1e-3)
        assert shifted.value.overlaps(constant_C(1e-3).value)

    def test_budget_exceeded_keeps_best_enclosure(self):
        config.constant_prime_limit = 1000
        with pytest.raises(BudgetExceeded) as info:
            constant_C(1e-6, RIGOROUS)
        best = info.value.best
        assert best.cutoff == 1000
        assert best.value.contains(PRINTED_C)

    @pytest.mark.slow
    def test_C_to_five_places(self):
        result = constant_C(1e-5, RIGOROUS)
        assert result.value.contains(PRINTED_C)
        assert result.value.width <= Fraction(1, 10 ** 5)

    @pytest.mark.slow
    def test_beta_to_five_places(self):
        result = constant_beta(1e-5, RIGOROUS)
        assert result.value.contains(PRINTED_BETA)
        assert result.value.width <= Fraction(1, 10 ** 5)

        half = beta_f(FMap.half_ceiling(), LinearCertificate(2, Fraction(4)), 1e-5, RIGOROUS)
        assert half.value.width <= Fraction(1, 10 ** 5)
        assert half.value.overlaps(result.value)
        assert abs(half.value.mid - result.value.mid) <= Fraction(1, 10 ** 5)


class TestAccelerated:
    def test_base_change_is_not_served_from_cache(self):
        first = constant_C(1e-7, ACCELERATED)
        config.accelerated_base = 1 << 10
        second = constant_C(1e-7, ACCELERATED)
        assert second.cutoff == 1 << 11
        assert second.primes_used < first.primes_used

    def test_C(self):
        result = constant_C(1e-7, ACCELERATED)
        assert result.value.approximate
        assert abs(result.value.mid - PRINTED_C) < Fraction(1, 10 ** 7)

    def test_beta_is_twice_C_minus_log_two(self):
        C = float(constant_C(1e-7, ACCELERATED).value)
        beta = float(constant_beta(1e-7, ACCELERATED).value)
        assert beta == pytest.approx(2 * (C - math.log(2)), abs=1e-9)
        assert abs(beta - float(PRINTED_BETA)) < 3e-7

    def test_half_ceiling_beta_f_is_beta(self):
        result = beta_f(FMap.half_ceiling(), LinearCertificate(2, Fraction(4)), mode=ACCELERATED)
        beta = constant_beta(mode=ACCELERATED)
        assert float(result.value) == pytest.approx(float(beta.value), abs=1e-9)


class TestBetaFChecks:
    def test_failing_certificate(self):
        with pytest.raises(VerificationFailed):
            beta_f(FMap.shifted_linear(1, -1), LinearCertificate(1, Fraction(1)), 1e-3)

    def test_irrational_map(self):
        with pytest.raises(Unsupported):
            beta_f(FMap.log_map(), LinearCertificate(1, Fraction(1)), 1e-3)

    def test_rigorous_needs_closed_form(self):
        config.certificate_bound = 2
        f, cert = FMap.shifted_linear(2, 0), LinearCertificate(1, Fraction(3))
        with pytest.raises(Unsupported):
            beta_f(f, cert, 1e-3, RIGOROUS)
        assert beta_f(f, cert, 1e-3, ACCELERATED).mode == ACCELERATED

    def test_upper_bound(self):
        cert = LinearCertificate(1, Fraction(2))
        bound = beta_f_upper_bound(cert)
        assert bound.lo < Fraction('3.7501930173') and bound.hi > Fraction('3.7501930172')
        assert beta_f(FMap.shifted_linear(1, -1), cert, 1e-3).value.hi < bound.lo


def test_minus_zeta_prime_2():
    value = minus_zeta_prime_2()
    assert value.lo < Fraction('0.93754825432') and value.hi > Fraction('0.93754825431')


@pytest.mark.parametrize('tol, mode', [(0, RIGOROUS), (-1e-3, RIGOROUS), (1e-3, 'fast')])
def test_invalid_arguments(tol, mode):
    with pytest.raises(DomainError):
        evaluate_constant(CSummand(), tol, mode)
