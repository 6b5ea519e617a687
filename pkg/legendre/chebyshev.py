"""
f-Chebyshev functions.

    theta_f(x) = sum_{f(p) <= x} log p
    psi_f(x)   = sum_{k >= 0} theta_{g_k}(x),  g_k(p) = f(p) p^k

Membership f(p) p^k <= x is decided exactly for rational maps and by interval
refinement otherwise. Every built-in divergent map is nondecreasing on the
primes, so the smallest value of f(p) p^k is reached at p = 2.
"""
import logging
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from mpmath import iv

from .config import config
from .errors import DomainError, Unsupported
from .fmap import Divergence, FMap, LinearCertificate
from .numeric import BoundedValue, Real, to_fraction, working_precision
from .primes import primes_up_to, theta, weighted_log_sum

logger = logging.getLogger(__name__)

INDEX_GUARD_BITS = 64


def _require_divergent(f: FMap) -> None:
    if f.divergence is not Divergence.TENDS_TO_INFINITY:
        raise Unsupported(f"f = {f.dsl} does not tend to infinity along the primes")


@dataclass(frozen=True)
class ChebyshevQuery:
    """A point x for f, with k_max the last k whose theta_{g_k}(x) can be nonzero
    (-1 when x is below every f(p))."""

    f: FMap
    x: Fraction
    k_max: int


def chebyshev_query(f: FMap, x: Real) -> ChebyshevQuery:
    _require_divergent(f)
    bound = to_fraction(x)
    if bound < 0:
        raise DomainError(f"x must be nonnegative, got {x}")
    k = -1
    while f.at_most(2, bound, k + 1):
        k += 1
    return ChebyshevQuery(f, bound, k)


def _support(f: FMap, bound: Fraction) -> List[int]:
    return [p for p in primes_up_to(f.support_bound(bound)) if f.at_most(p, bound)]


def theta_f(f: FMap, x: Real, precision: Optional[int] = None) -> BoundedValue:
    """Enclosure of sum of log p over the primes with f(p) <= x."""
    query = chebyshev_query(f, x)
    if query.k_max < 0:
        return BoundedValue.zero()
    return weighted_log_sum(((p, 1) for p in _support(f, query.x)), precision)


def psi_f(f: FMap, x: Real, precision: Optional[int] = None) -> BoundedValue:
    """Enclosure of sum_{k <= k_max} theta_{g_k}(x)."""
    query = chebyshev_query(f, x)
    if query.k_max < 0:
        return BoundedValue.zero()
    terms = []
    for p in _support(f, query.x):
        count = 1
        while count <= query.k_max and f.at_most(p, query.x, count):
            count += 1
        terms.append((p, count))
    return weighted_log_sum(terms, precision)


class ChebyshevIndex:
    """Prefix sums of log p over the sorted thresholds f(p) p^k <= x_max.

    Answers theta_f(x) (second_kind=False) or psi_f(x) (second_kind=True) for
    any x <= x_max by bisection. Rational maps only.
    """

    def __init__(self, f: FMap, x_max: Real, second_kind: bool = False,
                 precision: Optional[int] = None):
        _require_divergent(f)
        if not f.is_rational:
            raise Unsupported(f"index needs exact thresholds; f = {f.dsl} is not rational")
        self.f = f
        self.x_max = to_fraction(x_max)
        self.second_kind = second_kind

        entries: List[Tuple[Fraction, int]] = []
        for p in primes_up_to(f.support_bound(self.x_max)):
            threshold = f.exact(p)
            while threshold <= self.x_max:
                entries.append((threshold, p))
                if not second_kind:
                    break
                threshold *= p
        entries.sort()
        self.thresholds = [t for t, _ in entries]

        bits = (precision or config.precision) + INDEX_GUARD_BITS
        with working_precision(bits):
            running = iv.mpf(0)
            self._prefix = [running]
            for _, p in entries:
                running = running + iv.log(iv.mpf(p))
                self._prefix.append(running)
        logger.debug(f"Index for {f.dsl} up to {self.x_max}: {len(entries)} thresholds")

    def __len__(self) -> int:
        return len(self.thresholds)

    def __call__(self, x: Real) -> BoundedValue:
        bound = to_fraction(x)
        if bound > self.x_max:
            raise DomainError(f"x = {bound} is beyond the index range {self.x_max}")
        return BoundedValue(self._prefix[bisect_right(self.thresholds, bound)])


def corollary16_check(f: FMap, x: Real, precision: Optional[int] = None) -> bool:
    """theta_f(x) agrees with theta(f^{-1}(x)) for strictly increasing bijective f."""
    bound = to_fraction(x)
    inverse = f.inverse_floor(bound)
    left = theta_f(f, bound, precision)
    right = theta(max(inverse, 0), precision)
    return left.overlaps(right)


def lemma14_residual(cert: LinearCertificate, n: int, precision: Optional[int] = None) -> BoundedValue:
    """(1/n) sum_{m >= 1} [psi_f(alpha n/m) - theta_h(alpha n/m)] with
    f(x) = alpha x^2/(alpha x + M) and h(x) = alpha x (x-1)/(alpha x + M).

    Summands vanish once m > (alpha + M/2) n.
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    top = cert.alpha * n
    m_max = int((cert.alpha + cert.M / 2) * n)
    psi_index = ChebyshevIndex(cert.upper_map(), top, second_kind=True, precision=precision)
    theta_index = ChebyshevIndex(cert.lower_map(), top, precision=precision)

    bits = (precision or config.precision) + INDEX_GUARD_BITS
    with working_precision(bits):
        total = BoundedValue.zero()
        for m in range(1, m_max + 1):
            x = Fraction(top, m)
            total = total + psi_index(x) - theta_index(x)
        result = total / n
    logger.info(f"Residual for (alpha, M) = ({cert.alpha}, {cert.M}) at n = {n}: {result}")
    return result
