"""
Property suites behind the `verify` command.

Each suite is a list of named checks. A check returns (passed, detail); any
LegendreError raised inside a check is recorded as a failure of that check,
never as a crash of the run. All randomness comes from one seeded
random.Random, so a seed fully determines the report.
"""
import logging
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .bhargava import IntegerSet, bhargava_factorial, factorial_S, p_ordering
from .chebyshev import ChebyshevIndex, corollary16_check, lemma14_residual, psi_f, theta_f
from .constants import (
    ACCELERATED,
    RIGOROUS,
    CSummand,
    beta_f,
    beta_f_upper_bound,
    constant_beta,
    constant_C,
    summand_partial_sums,
)
from .errors import DomainError, LegendreError
from .factorials import divides, exponent_vector, factorial, generalized_binomial, log_factorial
from .fmap import FMap, LinearCertificate
from .numeric import BoundedValue, working_precision
from .primes import primes_up_to, psi, theta

logger = logging.getLogger(__name__)

SUITES = ('legendre', 'bhargava', 'chebyshev', 'constants')

PRINTED_C = Fraction('1.2269688')
PRINTED_BETA = Fraction('1.0676431')

# The log map has support up to e^n, so its samples stay small.
LOG_MAP_MAX_N = 8
LOG_MAP_MAX_X = 10


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ''


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    seed: int
    checks: Tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]


Check = Callable[[random.Random], Tuple[bool, str]]


def _builtin_maps() -> List[Tuple[FMap, int]]:
    """The four built-in divergent maps with the largest n sampled for each."""
    return [
        (FMap.identity(), 60),
        (FMap.shifted_linear(1, -1), 60),
        (FMap.half_ceiling(), 60),
        (FMap.log_map(), LOG_MAP_MAX_N),
    ]


# legendre

def check_legendre_consistency(rng: random.Random, limit: int = 500) -> Tuple[bool, str]:
    """Exponents for f = x against valuations of n! accumulated one factor at a time."""
    f = FMap.identity()
    running: Dict[int, int] = {}
    for n in range(limit + 1):
        m = n
        for p in primes_up_to(n):
            if m == 1:
                break
            while m % p == 0:
                running[p] = running.get(p, 0) + 1
                m //= p
        if exponent_vector(f, n).as_dict() != running:
            return False, f"exponents of {n}! disagree with direct valuation"
    return True, f"n <= {limit}"


def check_binomial_integrality(rng: random.Random, samples: int = 200) -> Tuple[bool, str]:
    for f, top in _builtin_maps():
        for _ in range(samples):
            n = rng.randint(0, top)
            k = rng.randint(0, n)
            generalized_binomial(f, n, k)
    return True, f"{samples} samples per map"


def check_comparison_divisibility(rng: random.Random, limit: int = 200) -> Tuple[bool, str]:
    """x - 1 <= x on the primes, so n!_x divides n!_{x-1}."""
    smaller, larger = FMap.shifted_linear(1, -1), FMap.identity()
    for n in range(limit + 1):
        if not divides(exponent_vector(larger, n), exponent_vector(smaller, n)):
            return False, f"{n}!_x does not divide {n}!_(x-1)"
    return True, f"n <= {limit}"


def check_abstract_axioms(rng: random.Random, limit: int = 200) -> Tuple[bool, str]:
    """0!_f = 1 and n! | n!_f for the built-in maps with f(p) <= p."""
    identity = FMap.identity()
    for f, _ in _builtin_maps():
        if factorial(f, 0)[1] != 1:
            return False, f"0!_f != 1 for f = {f.dsl}"
        top = LOG_MAP_MAX_N if f == FMap.log_map() else limit
        for n in range(top + 1):
            if not divides(exponent_vector(identity, n), exponent_vector(f, n)):
                return False, f"{n}! does not divide {n}!_f for f = {f.dsl}"
    return True, f"n <= {limit}"


def check_no_three_equal(rng: random.Random, limit: int = 200) -> Tuple[bool, str]:
    """No k >= 2 has k!_f = (k+1)!_f = (k+2)!_f."""
    for f, _ in _builtin_maps():
        top = LOG_MAP_MAX_N if f == FMap.log_map() else limit
        for k in range(2, top - 1):
            if exponent_vector(f, k).entries == exponent_vector(f, k + 1).entries == exponent_vector(f, k + 2).entries:
                return False, f"{k}!_f = {k + 1}!_f = {k + 2}!_f for f = {f.dsl}"
    return True, f"n <= {limit}"


def check_log_enclosure(rng: random.Random, limit: int = 100) -> Tuple[bool, str]:
    for f in (FMap.shifted_linear(1, -1), FMap.half_ceiling()):
        for n in range(limit + 1):
            enclosure = log_factorial(f, n)
            with working_precision(128):
                direct = BoundedValue.log(factorial(f, n)[1])
            if not enclosure.overlaps(direct):
                return False, f"log {n}!_f for f = {f.dsl}: {enclosure} misses {direct}"
    return True, f"n <= {limit}"


# bhargava

def check_ordering_invariance(rng: random.Random, runs: int = 50) -> Tuple[bool, str]:
    """v_n does not depend on how ties between minimal candidates are broken."""
    primes = IntegerSet.primes()
    for p in (2, 3, 5, 7):
        for n in sorted(rng.sample(range(1, 9), 3)):
            expected = p_ordering(primes, p, n + 1).step_valuations
            for _ in range(runs):
                tie_break = random.Random(rng.getrandbits(32))
                if p_ordering(primes, p, n + 1, tie_break).step_valuations != expected:
                    return False, f"step valuations for p = {p}, n = {n} depend on tie-breaks"
    return True, f"{runs} runs per (p, n)"


def check_legendre_oracle(rng: random.Random, limit: int = 12) -> Tuple[bool, str]:
    """(n+1)!_P from p-orderings equals n!_{x-1} from the Legendre formula."""
    f = FMap.shifted_linear(1, -1)
    primes = IntegerSet.primes()
    for n in range(limit + 1):
        legendre = factorial(f, n)[1]
        ordered = factorial_S(primes, n + 1)
        if legendre != ordered:
            return False, f"{n}!_(x-1) = {legendre} but {n + 1}!_P = {ordered}"
    return True, f"0 <= n <= {limit}"


def check_product_divisibility(rng: random.Random, limit: int = 10) -> Tuple[bool, str]:
    """k!_P l!_P divides (k+l)!_P."""
    primes = IntegerSet.primes()
    for total in range(limit + 1):
        whole = factorial_S(primes, total)
        for k in range(total + 1):
            if whole % (factorial_S(primes, k) * factorial_S(primes, total - k)):
                return False, f"{k}!_P {total - k}!_P does not divide {total}!_P"
    return True, f"k + l <= {limit}"


def check_difference_products(rng: random.Random, samples: int = 20) -> Tuple[bool, str]:
    """prod_{i<j} (a_i - a_j) is a multiple of 0!_P 1!_P ... n!_P."""
    pool = primes_up_to(200).tolist()
    primes = IntegerSet.primes()
    for _ in range(samples):
        chosen = rng.sample(pool, rng.randint(2, 7))
        product = math.prod(a - b for i, a in enumerate(chosen) for b in chosen[i + 1:])
        factorials = math.prod(factorial_S(primes, k) for k in range(len(chosen)))
        if product % factorials:
            return False, f"{factorials} does not divide the difference product of {chosen}"
    return True, f"{samples} samples"


def check_factorial_divides(rng: random.Random, limit: int = 12) -> Tuple[bool, str]:
    primes = IntegerSet.primes()
    for n in range(limit + 1):
        value = bhargava_factorial(primes, n).value
        if value % math.factorial(n):
            return False, f"{n}! does not divide {n}!_P = {value}"
    return True, f"n <= {limit}"


# chebyshev

def _chebyshev_maps() -> List[FMap]:
    return [
        FMap.identity(),
        FMap.shifted_linear(1, -1),
        FMap.half_ceiling(),
        FMap.certificate_upper(1, 2),
        FMap.certificate_lower(2, 4),
    ]


def _sample_points(rng: random.Random, count: int, top: int) -> List[Fraction]:
    # eighths hit integer thresholds often enough to exercise equality
    return [Fraction(rng.randint(1, 8 * top), 8) for _ in range(count)]


def check_step_functions(rng: random.Random, samples: int = 20) -> Tuple[bool, str]:
    """theta_f and psi_f are nondecreasing with psi_f >= theta_f >= 0."""
    for f in _chebyshev_maps():
        previous: Optional[BoundedValue] = None
        for x in sorted(_sample_points(rng, samples, 200)):
            first, second = theta_f(f, x), psi_f(f, x)
            if first.hi < 0 or second.hi < first.lo:
                return False, f"ordering of psi_f, theta_f fails for f = {f.dsl} at x = {x}"
            if previous is not None and first.hi < previous.lo:
                return False, f"theta_f decreases for f = {f.dsl} at x = {x}"
            previous = first
    return True, f"{samples} points per map"


def check_identity_reduction(rng: random.Random, samples: int = 20) -> Tuple[bool, str]:
    f = FMap.identity()
    for x in _sample_points(rng, samples, 1000):
        if not theta_f(f, x).overlaps(theta(x)):
            return False, f"theta_x({x}) differs from theta({x})"
        if not psi_f(f, x).overlaps(psi(x)):
            return False, f"psi_x({x}) differs from psi({x})"
    return True, f"{samples} points"


def check_inverse_identity(rng: random.Random, samples: int = 100) -> Tuple[bool, str]:
    """theta_f(x) = theta(f^{-1}(x)) for the strictly increasing bijective maps."""
    maps = [
        FMap.identity(),
        FMap.shifted_linear(1, -1),
        FMap.shifted_linear(2, -1),
        FMap.certificate_upper(1, 2),
        FMap.certificate_lower(1, 2),
    ]
    for f in maps:
        for x in _sample_points(rng, samples, 1000):
            if not corollary16_check(f, x):
                return False, f"theta_f({x}) != theta(f^-1({x})) for f = {f.dsl}"
    log_map = FMap.log_map()
    for x in _sample_points(rng, 10, LOG_MAP_MAX_X):
        if not corollary16_check(log_map, x):
            return False, f"theta_f({x}) != theta(e^{x}) for f = log(x)"
    return True, f"{samples} points per map"


def check_theta_cap(rng: random.Random, limit: int = 10 ** 6) -> Tuple[bool, str]:
    """theta(x) < 1.2 x for x <= limit; the ratio peaks at primes, so every
    prime is checked, plus enclosure spot checks."""
    primes = primes_up_to(limit).primes
    if not np.all(np.cumsum(np.log(primes.astype(np.float64))) < 1.2 * primes):
        return False, "theta(p) >= 1.2 p for some prime"
    index = ChebyshevIndex(FMap.identity(), limit)
    for x in [limit] + [rng.randint(2, limit) for _ in range(100)]:
        if index(x).hi >= Fraction(6, 5) * x:
            return False, f"theta({x}) >= 1.2 x"
    return True, f"x <= {limit}"


def check_residual_decay(rng: random.Random, ns: Sequence[int] = (10, 100, 1000)) -> Tuple[bool, str]:
    details = []
    for cert in (LinearCertificate(1, 2), LinearCertificate(2, 4)):
        magnitudes = [float(abs(lemma14_residual(cert, n))) for n in ns]
        details.append(f"({cert.alpha}, {cert.M}): " + ', '.join(f"{m:.4f}" for m in magnitudes))
        if not all(b < a for a, b in zip(magnitudes, magnitudes[1:])):
            return False, f"residual not decreasing: {details[-1]}"
    return True, '; '.join(details)


# constants

def check_identity_consistency(rng: random.Random, tol: float = 1e-4) -> Tuple[bool, str]:
    C = constant_C(tol, RIGOROUS)
    via_f = beta_f(FMap.shifted_linear(1, -1), LinearCertificate(1, 2), tol, RIGOROUS)
    if not C.value.overlaps(via_f.value):
        return False, f"C {C.value} and beta_(x-1) {via_f.value} are disjoint"
    beta = constant_beta(tol, RIGOROUS)
    via_half = beta_f(FMap.half_ceiling(), LinearCertificate(2, 4), tol, RIGOROUS)
    if not beta.value.overlaps(via_half.value):
        return False, f"beta {beta.value} and beta_halfceil {via_half.value} are disjoint"
    return True, f"tol {tol}"


def check_beta_from_C(rng: random.Random, tol: float = 1e-4) -> Tuple[bool, str]:
    """beta = 2 (C - log 2), termwise for odd p and with a vanishing p = 2 term."""
    C = constant_C(tol, ACCELERATED)
    beta = constant_beta(tol, ACCELERATED)
    gap = abs(float(beta.value.mid) - 2 * (float(C.value.mid) - math.log(2)))
    if gap >= 1e-8:
        return False, f"accelerated beta differs from 2 (C - log 2) by {gap:.2e}"
    rigorous = constant_beta(tol, RIGOROUS)
    if not rigorous.value.contains(Fraction(2 * (float(C.value.mid) - math.log(2)))):
        return False, f"rigorous beta {rigorous.value} misses 2 (C - log 2)"
    return True, f"gap {gap:.2e}"


def check_beta_f_bounds(rng: random.Random, tol: float = 1e-4) -> Tuple[bool, str]:
    """0 <= beta_f <= -2 M zeta'(2)."""
    cases = [
        (FMap.identity(), LinearCertificate(1, 0)),
        (FMap.shifted_linear(1, -1), LinearCertificate(1, 2)),
        (FMap.half_ceiling(), LinearCertificate(2, 4)),
    ]
    for f, cert in cases:
        value = beta_f(f, cert, tol, RIGOROUS).value
        bound = beta_f_upper_bound(cert)
        if value.lo < 0 or value.hi > bound.hi:
            return False, f"beta_f {value} for f = {f.dsl} outside [0, {bound}]"
    return True, f"{len(cases)} maps"


def check_partial_sums(rng: random.Random, tol: float = 1e-4) -> Tuple[bool, str]:
    final = constant_C(tol, RIGOROUS).value
    sums = summand_partial_sums(CSummand(), [10, 100, 1000, 10000, 100000])
    if not all(b.lo >= a.lo for a, b in zip(sums, sums[1:])):
        return False, "partial sums of C decrease"
    if sums[-1].hi > final.hi:
        return False, f"partial sum {sums[-1]} exceeds the enclosure {final}"
    return True, f"{len(sums)} cutoffs"


def check_tail_bound(rng: random.Random, limit: int = 10 ** 6) -> Tuple[bool, str]:
    """sum_{N < p <= limit} log p/p^2 <= (log N + 1)/N."""
    primes = primes_up_to(limit).tolist()
    for cutoff in (100, 1000, 10000, 100000):
        tail = math.fsum(math.log(p) / (p * p) for p in primes if p > cutoff)
        if tail > (math.log(cutoff) + 1) / cutoff:
            return False, f"tail beyond {cutoff} is {tail}"
    return True, f"cutoffs to {limit // 10}"


def check_printed_constants(rng: random.Random, tol: float = 1e-4) -> Tuple[bool, str]:
    C = constant_C(tol, ACCELERATED).value
    beta = constant_beta(tol, ACCELERATED).value
    c_gap, beta_gap = abs(C.mid - PRINTED_C), abs(beta.mid - PRINTED_BETA)
    if c_gap >= Fraction(1, 10 ** 7):
        return False, f"C = {C.mid_decimal(10)} is {float(c_gap):.1e} from 1.2269688"
    if beta_gap >= Fraction(3, 10 ** 7):
        return False, f"beta = {beta.mid_decimal(10)} is {float(beta_gap):.1e} from 1.0676431"
    return True, f"C {C.mid_decimal(9)}, beta {beta.mid_decimal(9)}"


_SUITE_CHECKS: Dict[str, List[Tuple[str, Check]]] = {
    'legendre': [
        ('legendre_consistency', check_legendre_consistency),
        ('binomial_integrality', check_binomial_integrality),
        ('comparison_divisibility', check_comparison_divisibility),
        ('abstract_axioms', check_abstract_axioms),
        ('no_three_equal', check_no_three_equal),
        ('log_enclosure', check_log_enclosure),
    ],
    'bhargava': [
        ('ordering_invariance', check_ordering_invariance),
        ('legendre_oracle', check_legendre_oracle),
        ('product_divisibility', check_product_divisibility),
        ('difference_products', check_difference_products),
        ('factorial_divides', check_factorial_divides),
    ],
    'chebyshev': [
        ('step_functions', check_step_functions),
        ('identity_reduction', check_identity_reduction),
        ('inverse_identity', check_inverse_identity),
        ('theta_cap', check_theta_cap),
        ('residual_decay', check_residual_decay),
    ],
    'constants': [
        ('identity_consistency', check_identity_consistency),
        ('beta_from_C', check_beta_from_C),
        ('beta_f_bounds', check_beta_f_bounds),
        ('partial_sums', check_partial_sums),
        ('tail_bound', check_tail_bound),
        ('printed_constants', check_printed_constants),
    ],
}


def _run_check(name: str, check: Check, rng: random.Random) -> CheckResult:
    start_time = time.time()
    try:
        passed, detail = check(rng)
    except LegendreError as exc:
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    logger.info(f"Check {name}: {'pass' if passed else 'FAIL'} - Time: {time.time() - start_time:.3f}s")
    return CheckResult(name, passed, detail)


def run_suite(name: str, seed: int = 0) -> SuiteReport:
    """Run one suite with a fresh RNG seeded by seed."""
    if name not in _SUITE_CHECKS:
        raise DomainError(f"unknown suite {name!r}; choose from {SUITES}")
    rng = random.Random(seed)
    logger.info(f"Running suite {name} with seed {seed}")
    checks = tuple(_run_check(check_name, check, rng) for check_name, check in _SUITE_CHECKS[name])
    return SuiteReport(name, seed, checks)


def run_suites(name: str = 'all', seed: int = 0) -> List[SuiteReport]:
    names = SUITES if name == 'all' else (name,)
    return [run_suite(suite, seed) for suite in names]
