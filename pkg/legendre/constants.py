"""
Prime-sum constants with guaranteed enclosures.

    beta_f = sum_p (p log p/(p-1)) (1/f(p) - alpha/p)
    C      = sum_p log p/(p-1)^2
    beta   = sum_p (log p/(p-1)) (p/ceil((p-1)/2) - 2)

Every summand is c(p) log p with c(p) >= 0 rational. Rigorous mode sums the
primes p <= N in interval arithmetic and adds an explicit tail bound, using
sum_{p > N} log p/p^2 <= sum_{m > N} log m/m^2 <= (log N + 1)/N.
Accelerated mode extrapolates float partial sums and is not rigorous.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import repeat
from typing import Any, List, Optional, Sequence

import mpmath
from mpmath import iv

from .config import config
from .errors import BudgetExceeded, DomainError, Unsupported, VerificationFailed
from .fmap import FMap, LinearCertificate, closed_form_justification, verify_certificate
from .numeric import BoundedValue, working_precision
from .primes import primes_up_to

logger = logging.getLogger(__name__)

RIGOROUS = 'rigorous'
ACCELERATED = 'accelerated'
MODES = (RIGOROUS, ACCELERATED)


# Summands

def _integral_tail(cutoff: int) -> Any:
    """(log N + 1)/N as an interval, at the current precision."""
    n = iv.mpf(cutoff)
    return (iv.log(n) + 1) / n


@dataclass(frozen=True)
class CSummand:
    name = 'C'

    def coefficient(self, p: int) -> Fraction:
        return Fraction(1, (p - 1) ** 2)

    def tail_bound(self, cutoff: int) -> BoundedValue:
        # log p/(p-1)^2 = (p/(p-1))^2 log p/p^2 and p/(p-1) <= (N+1)/N
        ratio = iv.mpf(cutoff + 1) / cutoff
        return BoundedValue(ratio * ratio * _integral_tail(cutoff))

    def tail_estimate(self, cutoff: int) -> float:
        return ((cutoff + 1) / cutoff) ** 2 * (math.log(cutoff) + 1) / cutoff


@dataclass(frozen=True)
class BetaSummand:
    name = 'beta'

    def coefficient(self, p: int) -> Fraction:
        return Fraction(1, p - 1) * (Fraction(p, -((1 - p) // 2)) - 2)

    def tail_bound(self, cutoff: int) -> BoundedValue:
        # odd p: the term is 2 log p/(p-1)^2
        ratio = iv.mpf(cutoff + 1) / cutoff
        return BoundedValue(2 * ratio * ratio * _integral_tail(cutoff))

    def tail_estimate(self, cutoff: int) -> float:
        return 2 * ((cutoff + 1) / cutoff) ** 2 * (math.log(cutoff) + 1) / cutoff


@dataclass(frozen=True)
class BetaFSummand:
    f: FMap
    cert: LinearCertificate

    @property
    def name(self) -> str:
        return f"beta_f[{self.f.dsl}]"

    def coefficient(self, p: int) -> Fraction:
        return Fraction(p, p - 1) * (1 / self.f.exact(p) - Fraction(self.cert.alpha, p))

    def tail_bound(self, cutoff: int) -> BoundedValue:
        # each term <= (p/(p-1)) M log p/p^2
        if self.cert.M == 0:
            return BoundedValue.zero()
        m = iv.mpf(self.cert.M.numerator) / self.cert.M.denominator
        return BoundedValue(m * (iv.mpf(cutoff + 1) / cutoff) * _integral_tail(cutoff))

    def tail_estimate(self, cutoff: int) -> float:
        return float(self.cert.M) * (cutoff + 1) / cutoff * (math.log(cutoff) + 1) / cutoff


@dataclass(frozen=True)
class ConstantResult:
    name: str
    value: BoundedValue
    primes_used: int
    tail_bound: BoundedValue
    target_tolerance: float
    mode: str
    cutoff: int
    error_estimate: Optional[float] = None


# Rigorous mode

def _block_sum(summand: Any, block: Sequence[int], bits: int) -> Any:
    with working_precision(bits):
        total = iv.mpf(0)
        for p in block:
            c = summand.coefficient(p)
            if c:
                total = total + iv.log(iv.mpf(p)) * (iv.mpf(c.numerator) / c.denominator)
        return total._mpi_


def partial_sum(summand: Any, primes: Sequence[int], precision: Optional[int] = None,
                threads: Optional[int] = None) -> BoundedValue:
    """Enclosure of sum c(p) log p over the given primes.

    Blocks are summed independently (concurrently when threads > 1) and
    merged in ascending block order, so the enclosure does not depend on the
    thread count.
    """
    bits = precision or config.precision
    threads = threads or config.threads
    size = config.block_size
    blocks = [list(primes[i:i + size]) for i in range(0, len(primes), size)]
    if threads > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_block_sum, repeat(summand), blocks, repeat(bits)))
    else:
        parts = [_block_sum(summand, block, bits) for block in blocks]
    with working_precision(bits):
        total = iv.mpf(0)
        for part in parts:
            total = total + iv.make_mpf(part)
        return BoundedValue(total)


def choose_cutoff(summand: Any, budget: float) -> int:
    """Smallest N >= 2 whose tail estimate is within budget (doubling, then bisection)."""
    if summand.tail_estimate(2) <= budget:
        return 2
    high = 4
    while summand.tail_estimate(high) > budget:
        high *= 2
    low = high // 2
    while high - low > 1:
        middle = (low + high) // 2
        if summand.tail_estimate(middle) <= budget:
            high = middle
        else:
            low = middle
    return high


def _rigorous(summand: Any, tol: float, threads: Optional[int], precision: Optional[int]) -> ConstantResult:
    bits = precision or config.precision
    cutoff = choose_cutoff(summand, tol / 2)
    # the float estimate may round below the interval bound; nudge until it holds
    while True:
        with working_precision(bits):
            tail = summand.tail_bound(cutoff)
        if tail.hi <= Fraction(tol) / 2:
            break
        cutoff += max(cutoff // 100, 1)

    limit = config.constant_prime_limit
    over_budget = cutoff > limit
    if over_budget:
        logger.warning(f"{summand.name}: tolerance {tol} needs primes to {cutoff}, budget is {limit}")
        cutoff = limit
        with working_precision(bits):
            tail = summand.tail_bound(cutoff)

    primes = primes_up_to(cutoff).tolist()
    logger.info(f"{summand.name}: summing {len(primes)} primes <= {cutoff} at {bits} bits")
    head = partial_sum(summand, primes, bits, threads)
    with working_precision(bits):
        value = BoundedValue.from_endpoints(head.lo, head.hi + tail.hi)

    result = ConstantResult(summand.name, value, len(primes), tail, tol, RIGOROUS, cutoff)
    if over_budget:
        raise BudgetExceeded(
            f"{summand.name} to tolerance {tol} needs more than {limit} as prime cutoff; "
            f"best enclosure {value}",
            best=result,
        )
    return result


# Accelerated mode

def _accelerated(summand: Any, tol: float) -> ConstantResult:
    base = config.accelerated_base
    primes = primes_up_to(2 * base).tolist()
    terms = [float(summand.coefficient(p)) * math.log(p) for p in primes]
    edges = {x: len(primes_up_to(x)) for x in (base // 2, base, 2 * base)}

    def partial(x: int) -> float:
        return math.fsum(terms[:edges[x]])

    # tails behave like c/N: R = 2 S(2N) - S(N) cancels the leading term
    current = 2 * partial(2 * base) - partial(base)
    previous = 2 * partial(base) - partial(base // 2)
    estimate = abs(current - previous)
    value = BoundedValue.from_endpoints(
        Fraction(current) - Fraction(estimate), Fraction(current) + Fraction(estimate), approximate=True
    )
    logger.info(f"{summand.name}: accelerated {current!r} (estimate {estimate:.2e})")
    return ConstantResult(summand.name, value, len(primes), BoundedValue.exact(estimate), tol,
                          ACCELERATED, 2 * base, error_estimate=estimate)


@lru_cache(maxsize=64)
def _evaluate(summand: Any, tol: float, mode: str, threads: Optional[int],
              precision: Optional[int], budget: int, base: int) -> ConstantResult:
    # budget and base are part of the cache key only; both are read from config
    if mode == ACCELERATED:
        return _accelerated(summand, tol)
    return _rigorous(summand, tol, threads, precision)


def evaluate_constant(summand: Any, tol: float = 1e-5, mode: str = RIGOROUS,
                      threads: Optional[int] = None, precision: Optional[int] = None) -> ConstantResult:
    if tol <= 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    return _evaluate(summand, float(tol), mode, threads, precision,
                     config.constant_prime_limit, config.accelerated_base)


def beta_f(f: FMap, cert: LinearCertificate, tol: float = 1e-5, mode: str = RIGOROUS,
           threads: Optional[int] = None, precision: Optional[int] = None) -> ConstantResult:
    """The linear coefficient beta_f for a certified rational map."""
    if not f.is_rational:
        raise Unsupported(f"beta_f needs exact values of f; f = {f.dsl} is not rational")
    report = verify_certificate(f, cert)
    if not report.passed:
        raise VerificationFailed(
            f"certificate ({cert.alpha}, {cert.M}) fails for {f.dsl} at p = {report.witness} "
            f"({report.side} side)"
        )
    if mode == RIGOROUS and closed_form_justification(f, cert) is None:
        raise Unsupported(
            f"no closed-form argument that ({cert.alpha}, {cert.M}) holds at every prime "
            f"for {f.dsl}; the rigorous tail bound needs one"
        )
    return evaluate_constant(BetaFSummand(f, cert), tol, mode, threads, precision)


def constant_C(tol: float = 1e-5, mode: str = RIGOROUS, threads: Optional[int] = None,
               precision: Optional[int] = None) -> ConstantResult:
    return evaluate_constant(CSummand(), tol, mode, threads, precision)


def constant_beta(tol: float = 1e-5, mode: str = RIGOROUS, threads: Optional[int] = None,
                  precision: Optional[int] = None) -> ConstantResult:
    return evaluate_constant(BetaSummand(), tol, mode, threads, precision)


def summand_partial_sums(summand: Any, cutoffs: Sequence[int],
                         precision: Optional[int] = None) -> List[BoundedValue]:
    """Partial sums over the primes <= each cutoff."""
    return [partial_sum(summand, primes_up_to(c).tolist(), precision, threads=1) for c in cutoffs]


def minus_zeta_prime_2() -> BoundedValue:
    """-zeta'(2) = sum_{m >= 2} log m/m^2, as a narrow enclosure."""
    with working_precision(96):
        value = -mpmath.zeta(2, 1, 1)
        centre = Fraction(mpmath.nstr(value, 30))
        lo, hi = centre - Fraction(1, 10 ** 20), centre + Fraction(1, 10 ** 20)
    return BoundedValue.from_endpoints(lo, hi)


def beta_f_upper_bound(cert: LinearCertificate) -> BoundedValue:
    """-2 M zeta'(2), an upper bound for beta_f under the certificate."""
    return minus_zeta_prime_2() * (2 * cert.M)
