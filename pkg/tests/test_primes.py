import math
from fractions import Fraction

import numpy as np
import pytest
from sympy import primepi, primerange

from legendre.config import config
from legendre.errors import CapacityError, DomainError
from legendre.numeric import BoundedValue
from legendre.primes import (
    CACHE_MAGIC,
    PrimeCache,
    PrimeSource,
    PrimeTable,
    _simple_sieve,
    first_primes,
    primes_up_to,
    psi,
    segmented_sieve,
    theta,
    verify_table,
)


class TestSieve:
    def test_small_tables(self):
        assert primes_up_to(10).tolist() == [2, 3, 5, 7]
        assert primes_up_to(2).tolist() == [2]
        assert len(primes_up_to(1)) == 0
        assert len(primes_up_to(0)) == 0

    def test_prime_count_to_a_million(self):
        table = primes_up_to(10 ** 6)
        assert len(table) == 78498
        assert len(table) == primepi(10 ** 6)

    def test_agrees_with_sympy(self):
        assert primes_up_to(5000).tolist() == list(primerange(2, 5001))

    def test_segments_do_not_change_the_result(self):
        assert np.array_equal(segmented_sieve(1000, segment_size=37), _simple_sieve(1000))

    def test_first_primes(self):
        assert first_primes(6) == [2, 3, 5, 7, 11, 13]
        assert first_primes(0) == []
        assert len(first_primes(1000)) == 1000

    def test_upto_restricts_table(self):
        table = primes_up_to(100)
        assert table.upto(20).tolist() == [2, 3, 5, 7, 11, 13, 17, 19]
        with pytest.raises(ValueError):
            table.upto(200)

    def test_limit_above_capacity(self):
        config.max_sieve_limit = 100
        with pytest.raises(CapacityError):
            PrimeSource().table(101)


class TestVerifyTable:
    def test_accepts_sieved_table(self):
        assert verify_table(primes_up_to(1000))

    def test_rejects_composite_entry(self):
        tampered = PrimeTable(30, np.array([2, 3, 5, 7, 11, 13, 17, 19, 23, 27], dtype=np.int64))
        assert not verify_table(tampered)

    def test_rejects_missing_prime(self):
        assert not verify_table(PrimeTable(30, np.array([2, 3, 5, 7, 11, 13, 17, 19, 23], dtype=np.int64)))


class TestPrimeCache:
    def test_save_and_load(self, tmp_path):
        cache = PrimeCache(tmp_path)
        table = PrimeTable(1000, segmented_sieve(1000))
        path = cache.save(table)
        assert path == tmp_path / 'primes_1000.bin'
        assert path.read_bytes().startswith(CACHE_MAGIC)
        assert cache.load(1000) == table
        assert cache.cached_limits() == [1000]

    def test_stale_file_is_ignored(self, tmp_path):
        cache = PrimeCache(tmp_path)
        cache.path_for(500).write_bytes(b'not a prime table')
        assert cache.load(500) is None

    def test_covering_table_is_reused(self, tmp_path):
        cache = PrimeCache(tmp_path)
        cache.save(PrimeTable(2000, segmented_sieve(2000)))
        assert cache.find_covering(1500).limit == 2000
        assert cache.find_covering(3000) is None

    def test_source_writes_and_reads_cache(self, tmp_path):
        config.cache_dir = tmp_path
        first = PrimeSource().table(1000, use_cache=True)
        assert (tmp_path / 'primes_1000.bin').exists()
        second = PrimeSource().table(1000, use_cache=True)
        assert first == second

    def test_disabled_cache_writes_nothing(self, tmp_path):
        config.cache_dir = tmp_path
        table = PrimeSource().table(1000, use_cache=False)
        assert table.tolist() == list(primerange(2, 1001))
        assert PrimeCache(tmp_path).cached_limits() == []


class TestChebyshev:
    def test_theta_small(self):
        assert theta(10).overlaps(BoundedValue.log(210))
        assert theta(Fraction(3, 2)) == BoundedValue.zero()

    def test_theta_at_hundred(self):
        product = math.prod(primerange(2, 101))
        assert theta(100).overlaps(BoundedValue.log(product))

    def test_psi_counts_prime_powers(self):
        # lcm(1..4) = 12
        assert psi(4).overlaps(BoundedValue.log(12))
        assert psi(10).overlaps(BoundedValue.log(2520))

    def test_negative_argument(self):
        with pytest.raises(DomainError):
            theta(-1)
        with pytest.raises(DomainError):
            psi(-1)

    def test_enclosure_is_narrow(self):
        assert theta(1000).width <= Fraction(config.theta_tolerance)

    def test_theta_steps_exactly_at_primes(self):
        primes = set(primerange(2, 201))
        previous = theta(1)
        for x in range(2, 201):
            current = theta(x)
            assert current.lo >= previous.lo
            if x in primes:
                assert (current - previous).overlaps(BoundedValue.log(x)), x
            else:
                assert current == previous, x
            assert theta(Fraction(2 * x + 1, 2)) == current
            previous = current
