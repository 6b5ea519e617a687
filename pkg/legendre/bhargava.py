"""
Bhargava p-orderings and the factorial n!_S, built from first principles.

This is deliberately independent of the Legendre-formula code so that the two
can be used as oracles for each other: (n+1)!_P = n!_{x-1} for the primes P.
"""
import logging
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import DomainError, TruncationTooSmall, UnstableTruncation
from .primes import first_primes, primes_up_to

logger = logging.getLogger(__name__)

# Prefix of the set attached to A202367; every element is even, so a
# p-ordering of this prefix does not reproduce that sequence.
S_PRIME_PREFIX: Tuple[int, ...] = (2, 4, 16, 22)

MIN_POOL = 64
MAX_POOL = 1 << 14


def padic_valuation(n: int, p: int) -> int:
    """Exponent of the highest power of p dividing n (n != 0)."""
    if n == 0:
        raise DomainError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        v += 1
        n //= p
    return v


@dataclass(frozen=True)
class IntegerSet:
    """Either the primes (optionally only those <= limit) or an explicit set."""

    kind: str
    elements: Tuple[int, ...] = ()
    limit: Optional[int] = None

    @classmethod
    def primes(cls, limit: Optional[int] = None) -> "IntegerSet":
        if limit is None:
            return cls('primes')
        return cls('primes', tuple(primes_up_to(limit)), limit)

    @classmethod
    def explicit(cls, values: Iterable[int]) -> "IntegerSet":
        values = [int(v) for v in values]
        if len(set(values)) != len(values):
            raise DomainError("explicit set elements must be distinct")
        return cls('explicit', tuple(sorted(values)))

    @property
    def is_finite(self) -> bool:
        return self.kind == 'explicit' or self.limit is not None

    @property
    def size(self) -> Optional[int]:
        return len(self.elements) if self.is_finite else None

    @property
    def label(self) -> str:
        if self.kind == 'primes':
            return 'primes' if self.limit is None else f"primes({self.limit})"
        return ','.join(str(v) for v in self.elements)

    def head(self, count: int) -> List[int]:
        """The count smallest elements (fewer when the set is smaller)."""
        if self.is_finite:
            return list(self.elements[:count])
        return first_primes(count)


@dataclass(frozen=True)
class POrdering:
    p: int
    sequence: Tuple[int, ...]
    step_valuations: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.sequence)

    def v(self, n: int) -> int:
        return self.p ** self.step_valuations[n]


def _greedy(pool: List[int], p: int, length: int, rng: Optional[random.Random]) -> POrdering:
    # cumulative[i] is the valuation of prod_{j<k} (pool[i] - a_j)
    cumulative = [0] * len(pool)
    available = list(range(len(pool)))
    sequence, steps = [], []
    for _ in range(length):
        best = min(cumulative[i] for i in available)
        candidates = [i for i in available if cumulative[i] == best]
        chosen = candidates[0] if rng is None else rng.choice(candidates)
        available.remove(chosen)
        a = pool[chosen]
        sequence.append(a)
        steps.append(best)
        for i in available:
            cumulative[i] += padic_valuation(pool[i] - a, p)
    return POrdering(p, tuple(sequence), tuple(steps))


def p_ordering(S: IntegerSet, p: int, length: int, rng: Optional[random.Random] = None) -> POrdering:
    """A greedy p-ordering a_0, ..., a_{length-1} of S.

    Ties go to the smallest element unless rng is given. Infinite sets are
    truncated to max(4 length, 64) elements, doubling until the valuations
    agree across one doubling.
    """
    if length < 1:
        raise DomainError(f"ordering length must be positive, got {length}")
    size = S.size
    if size is not None and size < length:
        raise TruncationTooSmall(f"{S.label} has {size} elements, ordering needs {length}")

    pool_size = max(4 * length, MIN_POOL)
    previous: Optional[POrdering] = None
    while True:
        pool = S.head(pool_size)
        ordering = _greedy(pool, p, length, rng)
        if size is not None and pool_size >= size:
            return ordering
        if previous is not None and previous.step_valuations == ordering.step_valuations:
            return ordering
        if pool_size >= MAX_POOL:
            raise UnstableTruncation(
                f"{p}-ordering of {S.label} still changing at {pool_size} elements"
            )
        previous = ordering
        pool_size *= 2


def is_greedy(ordering: POrdering, pool: List[int]) -> bool:
    """No unused pool element beats the chosen one at any step."""
    chosen: List[int] = []
    for a, step in zip(ordering.sequence, ordering.step_valuations):
        for candidate in pool:
            if candidate in chosen or candidate == a:
                continue
            if sum(padic_valuation(candidate - c, ordering.p) for c in chosen) < step:
                return False
        chosen.append(a)
    return True


def v_n(S: IntegerSet, p: int, n: int, rng: Optional[random.Random] = None) -> int:
    """v_n(S, p) = p^e, e the valuation at step n of a p-ordering."""
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    return p_ordering(S, p, n + 1, rng).v(n)


@dataclass(frozen=True)
class BhargavaFactorial:
    n: int
    value: int
    prime_bound: int
    valuations: Tuple[Tuple[int, int], ...]
    orderings: Dict[int, POrdering] = field(default_factory=dict, compare=False, repr=False)


def _default_prime_bound(S: IntegerSet, n: int) -> int:
    """Largest pairwise difference among the n + 1 smallest elements of S.

    Those elements are distinct mod any larger prime, so one of them is always
    free of p at step n and the larger primes contribute nothing.
    """
    head = S.head(n + 1)
    return max(head[-1] - head[0], 2)


@lru_cache(maxsize=256)
def bhargava_factorial(S: IntegerSet, n: int, prime_bound: Optional[int] = None) -> BhargavaFactorial:
    """n!_S = prod_{p <= prime_bound} v_n(S, p), with a doubling check on the bound."""
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    size = S.size
    if size is not None and size < n + 1:
        raise TruncationTooSmall(f"{S.label} has {size} elements, n!_S needs {n + 1}")
    bound = prime_bound or _default_prime_bound(S, n)

    value = 1
    valuations = []
    orderings = {}
    for p in primes_up_to(bound):
        ordering = p_ordering(S, p, n + 1)
        orderings[p] = ordering
        e = ordering.step_valuations[n]
        if e:
            valuations.append((p, e))
            value *= p ** e

    for p in primes_up_to(2 * bound):
        if p <= bound:
            continue
        if p_ordering(S, p, n + 1).step_valuations[n]:
            raise UnstableTruncation(
                f"prime {p} beyond the bound {bound} divides {n}!_S for S = {S.label}"
            )

    logger.debug(f"{n}!_S for S = {S.label}: {value} from {len(orderings)} primes")
    return BhargavaFactorial(n, value, bound, tuple(valuations), orderings)


def factorial_S(S: IntegerSet, n: int, prime_bound: Optional[int] = None) -> int:
    return bhargava_factorial(S, n, prime_bound).value
