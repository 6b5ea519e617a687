"""
Prime generation and the classical Chebyshev function.

Primes come from a segmented numpy sieve. Tables are kept in memory by a
shared PrimeSource and persisted in a small binary cache so repeated runs do
not re-sieve. Results are identical with the cache disabled.
"""
import logging
import math
import os
import struct
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Tuple

import numpy as np
from mpmath import iv
from sympy import isprime

from .config import config
from .errors import CapacityError, DomainError
from .numeric import BoundedValue, Real, to_fraction, working_precision

logger = logging.getLogger(__name__)

CACHE_MAGIC = b"LLPRIME1"
_HEADER = struct.Struct('<8sQQ')


def _simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if is_prime[i]:
            is_prime[i * i::i] = False
    return np.nonzero(is_prime)[0].astype(np.int64)


def segmented_sieve(limit: int, segment_size: Optional[int] = None) -> np.ndarray:
    """All primes <= limit, ascending, as int64."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    segment_size = segment_size or config.segment_size
    root = math.isqrt(limit)
    base = _simple_sieve(root)
    chunks = [base]
    low = root + 1
    while low <= limit:
        high = min(low + segment_size - 1, limit)
        segment = np.ones(high - low + 1, dtype=bool)
        for p in base:
            p = int(p)
            if p * p > high:
                break
            start = max(p * p, ((low + p - 1) // p) * p)
            segment[start - low::p] = False
        chunks.append(np.nonzero(segment)[0].astype(np.int64) + low)
        low = high + 1
    return np.concatenate(chunks)


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """All primes <= limit in ascending order."""

    limit: int
    primes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.primes.setflags(write=False)

    def __len__(self) -> int:
        return int(self.primes.size)

    def __iter__(self) -> Iterator[int]:
        return (int(p) for p in self.primes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PrimeTable):
            return NotImplemented
        return self.limit == other.limit and np.array_equal(self.primes, other.primes)

    def __repr__(self) -> str:
        return f"PrimeTable(limit={self.limit}, count={len(self)})"

    def tolist(self) -> List[int]:
        return [int(p) for p in self.primes]

    def upto(self, limit: int) -> "PrimeTable":
        if limit > self.limit:
            raise ValueError(f"table only covers primes <= {self.limit}")
        end = int(np.searchsorted(self.primes, limit, side='right'))
        return PrimeTable(max(limit, 0), self.primes[:end].copy())


class PrimeCache:
    """On-disk prime tables: header {magic, limit, count} then uint64 primes,
    all little-endian. One file per limit."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)

    def path_for(self, limit: int) -> Path:
        return self.directory / f"primes_{limit}.bin"

    def cached_limits(self) -> List[int]:
        if not self.directory.is_dir():
            return []
        limits = []
        for path in self.directory.glob('primes_*.bin'):
            try:
                limits.append(int(path.stem.split('_', 1)[1]))
            except ValueError:
                continue
        return sorted(limits)

    def load(self, limit: int) -> Optional[PrimeTable]:
        path = self.path_for(limit)
        try:
            with open(path, 'rb') as handle:
                magic, stored_limit, count = _HEADER.unpack(handle.read(_HEADER.size))
                body = np.frombuffer(handle.read(), dtype='<u8')
        except (OSError, struct.error) as exc:
            logger.warning(f"Ignoring unreadable prime cache {path}: {exc}")
            return None
        if magic != CACHE_MAGIC or stored_limit != limit or count != body.size:
            logger.warning(f"Ignoring stale prime cache {path}")
            return None
        return PrimeTable(limit, body.astype(np.int64))

    def save(self, table: PrimeTable) -> Optional[Path]:
        path = self.path_for(table.limit)
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix('.tmp')
            with open(tmp, 'wb') as handle:
                handle.write(_HEADER.pack(CACHE_MAGIC, table.limit, len(table)))
                handle.write(table.primes.astype('<u8').tobytes())
            os.replace(tmp, path)
        except OSError as exc:
            logger.warning(f"Could not write prime cache {path}: {exc}")
            return None
        logger.info(f"Cached {len(table)} primes <= {table.limit} at {path}")
        return path

    def find_covering(self, limit: int) -> Optional[PrimeTable]:
        for cached in self.cached_limits():
            if cached >= limit:
                table = self.load(cached)
                if table is not None:
                    return table
        return None


class PrimeSource:
    """Shared, growable view of the primes.

    The in-memory table grows at least geometrically so that a stream of
    increasing requests sieves O(log) times.
    """

    def __init__(self) -> None:
        self._table: Optional[PrimeTable] = None

    def clear(self) -> None:
        self._table = None

    def table(self, limit: int, use_cache: Optional[bool] = None) -> PrimeTable:
        limit = int(limit)
        if limit < 2:
            return PrimeTable(max(limit, 0), np.zeros(0, dtype=np.int64))
        if limit > config.max_sieve_limit:
            raise CapacityError(
                f"prime limit {limit} exceeds the configured maximum {config.max_sieve_limit}"
            )
        current = self._table
        if current is not None and current.limit >= limit:
            return current.upto(limit)

        target = limit
        if current is not None:
            target = min(max(limit, 2 * current.limit), config.max_sieve_limit)
        self._table = self._build(target, config.cache_enabled if use_cache is None else use_cache)
        return self._table.upto(limit)

    def _build(self, limit: int, use_cache: bool) -> PrimeTable:
        cache = PrimeCache(config.cache_dir) if use_cache else None
        if cache is not None:
            table = cache.find_covering(limit)
            if table is not None:
                logger.info(f"Prime cache hit for limit {limit} (file limit {table.limit})")
                return table
        logger.info(f"Sieving primes up to {limit}")
        try:
            table = PrimeTable(limit, segmented_sieve(limit))
        except MemoryError as exc:
            raise CapacityError(f"not enough memory to sieve up to {limit}") from exc
        if cache is not None:
            cache.save(table)
        return table


_source = PrimeSource()


def prime_source() -> PrimeSource:
    return _source


def primes_up_to(limit: int, use_cache: Optional[bool] = None) -> PrimeTable:
    """All primes <= limit; an empty table when limit < 2."""
    return _source.table(limit, use_cache=use_cache)


def first_primes(count: int) -> List[int]:
    """The first count primes."""
    if count <= 0:
        return []
    # p_n < n (log n + log log n) for n >= 6
    bound = 15 if count < 6 else int(count * (math.log(count) + math.log(math.log(count)))) + 1
    return primes_up_to(bound).tolist()[:count]


def verify_table(table: PrimeTable) -> bool:
    """Independent check of a table: strictly increasing, every entry prime,
    and the count matches an independent recount."""
    values = table.tolist()
    if any(b <= a for a, b in zip(values, values[1:])):
        return False
    if not all(isprime(p) for p in values):
        return False
    return len(values) == sum(1 for m in range(2, table.limit + 1) if isprime(m))


def weighted_log_sum(terms: Iterable[Tuple[int, int]], precision: Optional[int] = None) -> BoundedValue:
    """Enclosure of sum w log p over (p, w) pairs, in the given order.

    Precision doubles until the width is within the configured tolerance.
    """
    terms = list(terms)
    if not terms:
        return BoundedValue.zero()
    bits = precision or config.precision
    tolerance = Fraction(config.theta_tolerance)
    while True:
        with working_precision(bits):
            total = iv.mpf(0)
            for p, weight in terms:
                total = total + iv.log(iv.mpf(p)) * weight
            value = BoundedValue(total)
        if value.width <= tolerance or bits >= config.precision_ceiling:
            return value
        bits = min(2 * bits, config.precision_ceiling)


def theta(x: Real, precision: Optional[int] = None) -> BoundedValue:
    """Enclosure of the Chebyshev function sum_{p <= x} log p, over ascending primes."""
    bound = to_fraction(x)
    if bound < 0:
        raise DomainError(f"theta needs x >= 0, got {x}")
    return weighted_log_sum(((p, 1) for p in primes_up_to(math.floor(bound))), precision)


def psi(x: Real, precision: Optional[int] = None) -> BoundedValue:
    """Second Chebyshev function: sum of log p over prime powers p^j <= x."""
    bound = to_fraction(x)
    if bound < 0:
        raise DomainError(f"psi needs x >= 0, got {x}")
    terms = []
    for p in primes_up_to(math.floor(bound)):
        power, count = p, 0
        while power <= bound:
            count += 1
            power *= p
        terms.append((p, count))
    return weighted_log_sum(terms, precision)
