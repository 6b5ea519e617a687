"""
Generalized factorials through the Legendre-type formula

    n!_f = prod_p p^(sum_k floor(n / (f(p) p^k)))

Factorials are kept as exponent vectors; the big integer is expanded on demand.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
from mpmath import iv

from .config import config
from .errors import DivergentFactorial, DomainError, ViolatedDivisibility
from .fmap import Divergence, FMap, floor_quotient
from .numeric import BoundedValue, working_precision
from .primes import PrimeTable, primes_up_to

logger = logging.getLogger(__name__)

# Extra bits used on top of the requested precision for log sums.
LOG_GUARD_BITS = 64


@dataclass(frozen=True)
class ExponentVector:
    """Sparse prime -> exponent map of a generalized factorial.

    entries are (p, e) pairs, ascending in p, with every e >= 1.
    """

    n: int
    f_descriptor: str
    entries: Tuple[Tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(self.entries)

    def as_dict(self) -> Dict[int, int]:
        return dict(self.entries)

    def exponent_of(self, p: int) -> int:
        return self.as_dict().get(p, 0)

    @property
    def support(self) -> List[int]:
        return [p for p, _ in self.entries]

    def value(self) -> int:
        return math.prod(p ** e for p, e in self.entries)

    def to_json_obj(self) -> Dict[str, object]:
        return {'f': self.f_descriptor, 'n': self.n, 'factors': [[p, e] for p, e in self.entries]}

    def __str__(self) -> str:
        if not self.entries:
            return '1'
        return ' * '.join(str(p) if e == 1 else f"{p}^{e}" for p, e in self.entries)


def exponent(f: FMap, p: int, n: int) -> int:
    """sum_{k >= 0} floor(n / (f(p) p^k)), stopping at the first zero term."""
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    total = 0
    k = 0
    while True:
        term = floor_quotient(n, f, p, k)
        if term == 0:
            return total
        total += term
        k += 1


def contributing_primes(f: FMap, n: int) -> PrimeTable:
    """The primes p with f(p) <= n, i.e. the support of n!_f."""
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    if f.divergence is not Divergence.TENDS_TO_INFINITY:
        raise DivergentFactorial(f.dsl, n)
    candidates = primes_up_to(f.support_bound(n))
    keep = np.array([f.at_most(p, n) for p in candidates], dtype=bool)
    return PrimeTable(candidates.limit, candidates.primes[keep].copy())


@lru_cache(maxsize=1024)
def exponent_vector(f: FMap, n: int) -> ExponentVector:
    """The exponent vector of n!_f; cached per (f, n)."""
    entries = []
    for p in contributing_primes(f, n):
        e = exponent(f, p, n)
        if e:
            entries.append((p, e))
    return ExponentVector(n, f.dsl, tuple(entries))


def factorial(f: FMap, n: int) -> Tuple[ExponentVector, int]:
    """n!_f as (exponent vector, expanded integer)."""
    vector = exponent_vector(f, n)
    logger.debug(f"{n}!_{f.dsl}: {len(vector)} primes in support")
    return vector, vector.value()


def log_of_vector(vector: ExponentVector) -> BoundedValue:
    """sum e log p at the current working precision, ascending in p."""
    total = iv.mpf(0)
    for p, e in vector.entries:
        total = total + iv.log(iv.mpf(p)) * e
    return BoundedValue(total)


def log_factorial(f: FMap, n: int, precision: Optional[int] = None) -> BoundedValue:
    """Enclosure of log n!_f of width <= 2^(-precision+4)."""
    precision = precision or config.precision
    vector = exponent_vector(f, n)
    target = Fraction(1, 2 ** (precision - 4))
    bits = precision + LOG_GUARD_BITS
    while True:
        with working_precision(bits):
            value = log_of_vector(vector)
        if value.width <= target:
            return value
        if bits >= config.precision_ceiling:
            logger.warning(f"log {n}!_{f.dsl}: width {float(value.width):.3e} above 2^{-precision + 4} at the ceiling")
            return value
        bits = min(2 * bits, config.precision_ceiling)


def _subtract(total: ExponentVector, *parts: ExponentVector) -> Dict[int, int]:
    remaining = total.as_dict()
    for part in parts:
        for p, e in part.entries:
            remaining[p] = remaining.get(p, 0) - e
    return remaining


def generalized_binomial(f: FMap, n: int, k: int) -> int:
    """n!_f / (k!_f (n-k)!_f), computed on exponent vectors."""
    if not 0 <= k <= n:
        raise DomainError(f"binomial needs 0 <= k <= n, got n = {n}, k = {k}")
    remaining = _subtract(exponent_vector(f, n), exponent_vector(f, k), exponent_vector(f, n - k))
    negative = {p: e for p, e in remaining.items() if e < 0}
    if negative:
        raise ViolatedDivisibility(
            f"{k}!_f * {n - k}!_f does not divide {n}!_f for f = {f.dsl}: exponents {negative}"
        )
    return math.prod(p ** e for p, e in remaining.items() if e)


def divides(a: ExponentVector, b: ExponentVector) -> bool:
    """True iff a's exponent is at most b's at every prime."""
    exponents = b.as_dict()
    return all(e <= exponents.get(p, 0) for p, e in a.entries)
