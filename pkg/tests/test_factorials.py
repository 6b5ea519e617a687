import math
import threading
from fractions import Fraction

import pytest
from sympy import factorint, primerange

from legendre.errors import DivergentFactorial, DomainError
from legendre.factorials import (
    ExponentVector,
    contributing_primes,
    divides,
    exponent,
    exponent_vector,
    factorial,
    generalized_binomial,
    log_factorial,
)
from legendre.fmap import FMap
from legendre.numeric import BoundedValue, working_precision

IDENTITY = FMap.identity()
SHIFTED = FMap.shifted_linear(1, -1)
HALF = FMap.half_ceiling()
LOG = FMap.log_map()


def value(f, n):
    return factorial(f, n)[1]


class TestFactorial:
    def test_identity_is_the_classical_factorial(self):
        assert [value(IDENTITY, n) for n in range(8)] == [math.factorial(n) for n in range(8)]

    def test_log_map(self):
        assert [value(LOG, n) for n in range(4)] == [1, 2, 840, 1862340480]

    def test_shifted_primes(self):
        assert [value(SHIFTED, n) for n in range(6)] == [1, 2, 24, 48, 5760, 11520]

    def test_half_ceiling(self):
        assert [value(HALF, n) for n in range(6)] == [1, 6, 360, 45360, 5443200, 359251200]

    def test_factorization_matches_sympy(self):
        vector, total = factorial(SHIFTED, 30)
        assert vector.as_dict() == factorint(total)

    def test_vector_rendering(self):
        vector = exponent_vector(SHIFTED, 5)
        assert str(vector) == '2^8 * 3^2 * 5'
        assert vector.to_json_obj() == {'f': 'x-1', 'n': 5, 'factors': [[2, 8], [3, 2], [5, 1]]}
        assert str(exponent_vector(IDENTITY, 0)) == '1'

    def test_negative_n(self):
        with pytest.raises(DomainError):
            factorial(IDENTITY, -1)

    def test_non_divergent_map(self):
        with pytest.raises(DivergentFactorial, match='is not defined'):
            factorial(FMap.sine_abs(), 1)


class TestExponent:
    def test_single_exponents(self):
        assert exponent(IDENTITY, 2, 4) == 3
        assert exponent(LOG, 2, 3) == 7
        assert exponent(SHIFTED, 3, 4) == 2
        assert exponent(IDENTITY, 7, 6) == 0

    def test_contributing_primes(self):
        assert contributing_primes(SHIFTED, 10).tolist() == list(primerange(2, 12))
        assert contributing_primes(LOG, 3).tolist() == list(primerange(2, 20))
        assert contributing_primes(HALF, 2).tolist() == [2, 3, 5]
        assert len(contributing_primes(IDENTITY, 1)) == 0


class TestLogFactorial:
    def test_small_values(self):
        assert log_factorial(SHIFTED, 1).overlaps(BoundedValue.log(2))
        assert log_factorial(IDENTITY, 10).overlaps(BoundedValue.log(3628800))
        assert log_factorial(IDENTITY, 0) == BoundedValue.zero()

    def test_printed_values(self):
        assert log_factorial(SHIFTED, 10).matches_display('26.6310')
        assert log_factorial(HALF, 10).matches_display('56.4899')

    def test_width_follows_precision(self):
        assert log_factorial(SHIFTED, 1000, precision=64).width <= 2 ** -60
        assert log_factorial(SHIFTED, 1000, precision=200).width <= 2 ** -196

    def test_width_holds_while_another_thread_changes_precision(self):
        stop = threading.Event()

        def churn():
            while not stop.is_set():
                with working_precision(40):
                    pass

        worker = threading.Thread(target=churn)
        worker.start()
        try:
            widths = [log_factorial(SHIFTED, 2000, precision=300).width for _ in range(50)]
        finally:
            stop.set()
            worker.join()
        assert max(widths) <= Fraction(1, 2 ** 296)


class TestBinomial:
    def test_classical_binomial(self):
        assert generalized_binomial(IDENTITY, 5, 2) == 10
        assert generalized_binomial(IDENTITY, 7, 0) == 1

    def test_shifted_binomial(self):
        # 4!_{x-1} / (2!_{x-1})^2 = 5760 / 576
        assert generalized_binomial(SHIFTED, 4, 2) == 10

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            generalized_binomial(IDENTITY, 2, 3)


class TestDivides:
    def test_identity_divides_shifted(self):
        for n in range(20):
            assert divides(exponent_vector(IDENTITY, n), exponent_vector(SHIFTED, n))

    def test_reflexive_and_strict(self):
        vector = exponent_vector(HALF, 7)
        assert divides(vector, vector)
        assert not divides(exponent_vector(IDENTITY, 2), exponent_vector(IDENTITY, 1))

    def test_sparse_vectors(self):
        small = ExponentVector(0, 'x', ((2, 1),))
        large = ExponentVector(0, 'x', ((3, 1),))
        assert not divides(small, large)
