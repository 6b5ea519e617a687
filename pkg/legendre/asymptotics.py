"""
Comparison of log n!_f with log(alpha n)! + beta_f n, and the two reference
tables for f = x-1 (the primes) and f = ceil((x-1)/2) (A202367).
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from mpmath import iv

from .config import config
from .constants import ACCELERATED, RIGOROUS, beta_f
from .errors import CapacityError, DomainError, VerificationFailed
from .factorials import factorial, log_factorial
from .fmap import FMap, LinearCertificate
from .numeric import BoundedValue, working_precision

logger = logging.getLogger(__name__)

EXACT_LOG_FACTORIAL_LIMIT = 10 ** 6
TABLE_GUARD_BITS = 64
CROSS_CHECK_TOLERANCE = 1e-5

REFERENCE_ROWS = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 100, 1000, 5000, 10000)


def log_classic_factorial(m: int, precision: Optional[int] = None, stirling: bool = False) -> BoundedValue:
    """Enclosure of log m!, or the flagged Stirling approximation
    log(sqrt(2 pi) m^(m + 1/2) e^(-m))."""
    if m < 0:
        raise DomainError(f"m must be nonnegative, got {m}")
    bits = (precision or config.precision) + TABLE_GUARD_BITS
    with working_precision(bits):
        if stirling:
            if m == 0:
                return BoundedValue(iv.mpf(0), approximate=True)
            value = iv.log(iv.sqrt(2 * iv.pi)) + (iv.mpf(2 * m + 1) / 2) * iv.log(iv.mpf(m)) - m
            return BoundedValue(value, approximate=True)
        if m <= 1:
            return BoundedValue.zero()
        if m > EXACT_LOG_FACTORIAL_LIMIT:
            raise CapacityError(f"exact log {m}! is limited to m <= {EXACT_LOG_FACTORIAL_LIMIT}")
        return BoundedValue(iv.log(iv.mpf(math.factorial(m))))


@dataclass(frozen=True)
class TableRow:
    n: int
    argument: int
    lhs: BoundedValue
    rhs: BoundedValue
    residual: BoundedValue


@dataclass(frozen=True)
class TableSpec:
    which: int
    f: FMap
    cert: LinearCertificate
    shift: int
    lhs_label: str
    rhs_label: str
    reference: Dict[int, Tuple[str, str]]
    # printed row label -> argument the printed values were computed at
    evaluated_at: Dict[int, int] = field(default_factory=dict)

    def argument_for(self, n: int) -> int:
        return self.evaluated_at.get(n, n)


TABLES: Dict[int, TableSpec] = {
    1: TableSpec(
        which=1,
        f=FMap.shifted_linear(1, -1),
        cert=LinearCertificate(1, 2),
        shift=1,
        lhs_label='log (n+1)!_P',
        rhs_label='log n! + Cn',
        reference={
            1: ('.6931', '1.2269'),
            2: ('3.1780', '3.1470'),
            3: ('3.8712', '5.4726'),
            4: ('8.6586', '8.0859'),
            5: ('9.3518', '10.9223'),
            6: ('14.8812', '13.9410'),
            7: ('15.5744', '17.1139'),
            8: ('21.0550', '20.4203'),
            9: ('21.7482', '23.8445'),
            10: ('26.6310', '27.3741'),
            100: ('471.9704', '480.6040'),
            1000: ('7,119.5084', '7,130.9600'),
            5000: ('43,759.7980', '43,726.0000'),
            10000: ('94,417.8375', '94,378.6000'),
        },
        evaluated_at={100: 99, 1000: 999},
    ),
    2: TableSpec(
        which=2,
        f=FMap.half_ceiling(),
        cert=LinearCertificate(2, 4),
        shift=1,
        lhs_label="log (n+1)!_S'",
        rhs_label='log (2n)! + beta n',
        reference={
            1: ('1.7917', '1.7607'),
            2: ('5.8861', '5.3133'),
            3: ('10.7223', '9.7821'),
            4: ('15.5098', '14.8751'),
            5: ('19.6995', '20.4426'),
            6: ('29.4033', '26.3931'),
            7: ('31.1951', '32.6647'),
            8: ('39.5089', '39.2130'),
            9: ('48.3882', '46.0042'),
            10: ('56.4899', '53.0120'),
            100: ('982.0880', '969.9960'),
            1000: ('14,288.7934', '14,274.2000'),
            5000: ('87,486.3657', '87,447.1000'),
            10000: ('188,805.0729', '188,752.0000'),
        },
    ),
}


def beta_enclosure(f: FMap, cert: LinearCertificate, beta_mode: str = ACCELERATED,
                   cross_check: bool = False) -> BoundedValue:
    """beta_f for the table right-hand side, optionally checked against the
    rigorous enclosure."""
    result = beta_f(f, cert, tol=CROSS_CHECK_TOLERANCE, mode=beta_mode)
    if cross_check and beta_mode == ACCELERATED:
        rigorous = beta_f(f, cert, tol=CROSS_CHECK_TOLERANCE, mode=RIGOROUS)
        if not rigorous.value.overlaps(result.value):
            raise VerificationFailed(
                f"accelerated beta_f {result.value} misses the rigorous enclosure {rigorous.value}"
            )
    return result.value


def table(f: FMap, cert: LinearCertificate, rows: Sequence[int], shift: int = 0,
          alpha_n_map: Optional[Callable[[int], int]] = None, beta_mode: str = ACCELERATED,
          cross_check: bool = False, precision: Optional[int] = None,
          stirling: bool = False, arguments: Optional[Dict[int, int]] = None) -> List[TableRow]:
    """Rows (n, log n!_f, log(alpha n)! + beta_f n, residual).

    shift only labels the rows: log n!_f is the log of the (n + shift)-th
    factorial of the associated set. arguments maps a row label to the
    argument actually evaluated.
    """
    alpha_n = alpha_n_map or (lambda n: cert.alpha * n)
    arguments = arguments or {}
    beta = beta_enclosure(f, cert, beta_mode, cross_check)
    bits = (precision or config.precision) + TABLE_GUARD_BITS

    result = []
    for n in rows:
        if n < 0:
            raise DomainError(f"row n must be nonnegative, got {n}")
        argument = arguments.get(n, n)
        lhs = log_factorial(f, argument, precision)
        with working_precision(bits):
            rhs = log_classic_factorial(alpha_n(argument), precision, stirling) + beta * argument
            residual = lhs - rhs
        result.append(TableRow(n, argument, lhs, rhs, residual))
    logger.info(f"Computed {len(result)} rows for f = {f.dsl} (rows label (n+{shift})! of the set)")
    return result


@dataclass(frozen=True)
class RowComparison:
    row: TableRow
    lhs_text: str
    rhs_text: str
    lhs_matches: bool
    rhs_matches: bool

    @property
    def matches(self) -> bool:
        return self.lhs_matches and self.rhs_matches


def reproduce_table(which: int, rows: Optional[Sequence[int]] = None,
                    beta_mode: str = ACCELERATED, cross_check: bool = True,
                    precision: Optional[int] = None) -> List[RowComparison]:
    """Compute reference rows and compare them at their printed precision.

    By default an accelerated beta_f is checked against the rigorous enclosure
    at the cross-check tolerance before any row is computed.
    """
    spec = TABLES.get(which)
    if spec is None:
        raise DomainError(f"no table {which}; choose 1 or 2")
    rows = list(rows or REFERENCE_ROWS)
    missing = [n for n in rows if n not in spec.reference]
    if missing:
        raise DomainError(f"table {which} has no printed rows for n = {missing}")
    computed = table(spec.f, spec.cert, rows, spec.shift, beta_mode=beta_mode,
                     cross_check=cross_check, precision=precision, arguments=spec.evaluated_at)
    comparisons = []
    for row in computed:
        lhs_text, rhs_text = spec.reference[row.n]
        comparisons.append(RowComparison(
            row, lhs_text, rhs_text,
            row.lhs.matches_display(lhs_text),
            row.rhs.matches_display(rhs_text),
        ))
    return comparisons


def residual_trend(f: FMap, cert: LinearCertificate, ns: Sequence[int],
                   beta_mode: str = ACCELERATED) -> List[Tuple[int, float]]:
    """(n, |r(n)|/n) with r(n) = log n!_f - log(alpha n)! - beta_f n."""
    small = [n for n in ns if n < 1]
    if small:
        raise DomainError(f"residual_trend needs n >= 1, got {small}")
    return [(row.n, float(abs(row.residual)) / row.n)
            for row in table(f, cert, ns, beta_mode=beta_mode)]


def strictly_decreasing(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def a202367_sequence(count: int) -> List[int]:
    """prod_p p^(sum_k floor((n-1)/(ceil((p-1)/2) p^k))) for n = 1..count."""
    if count < 1:
        raise DomainError(f"count must be positive, got {count}")
    f = FMap.half_ceiling()
    return [factorial(f, n - 1)[1] for n in range(1, count + 1)]
