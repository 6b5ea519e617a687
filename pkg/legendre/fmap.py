"""
Maps f from the primes to the positive reals.

An FMap is a closed enumeration of kinds so that divergence attributes and
linear certificates can be audited. Rational kinds evaluate exactly; the log
and sine kinds evaluate as shrinking intervals.
"""
import logging
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from mpmath import iv

from .config import config
from .errors import AmbiguousComparison, AmbiguousFloor, CapacityError, DomainError, ParseError, Unsupported
from .numeric import (
    UNSETTLED,
    BoundedValue,
    PrecisionExhausted,
    Real,
    escalate,
    settle_at_most,
    settle_floor,
    to_fraction,
    working_precision,
)
from .primes import primes_up_to

logger = logging.getLogger(__name__)

# Guard bits added on top of the requested precision so that the returned
# interval width stays within 2^(-precision+2) for log p and |sin p|.
GUARD_BITS = 16


class FMapKind(str, Enum):
    IDENTITY = 'identity'
    SHIFTED_LINEAR = 'shifted_linear'
    HALF_CEILING = 'half_ceiling'
    LOG = 'log_map'
    SINE_ABS = 'sine_abs'
    CERTIFICATE_UPPER = 'certificate_upper'
    CERTIFICATE_LOWER = 'certificate_lower'


class Divergence(str, Enum):
    TENDS_TO_INFINITY = 'tends_to_infinity'
    NOT_DIVERGENT = 'not_divergent'
    UNKNOWN = 'unknown'


_RATIONAL_KINDS = frozenset({
    FMapKind.IDENTITY,
    FMapKind.SHIFTED_LINEAR,
    FMapKind.HALF_CEILING,
    FMapKind.CERTIFICATE_UPPER,
    FMapKind.CERTIFICATE_LOWER,
})


def _format_rational(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _coefficient(value: int) -> str:
    return '' if value == 1 else str(value)


@dataclass(frozen=True)
class FMap:
    """A map f: primes -> positive reals.

    Parameters by kind:
      shifted_linear      f(x) = (x + b)/a
      certificate_upper   f(x) = alpha x^2/(alpha x + M)
      certificate_lower   f(x) = alpha x (x - 1)/(alpha x + M)
    """

    kind: FMapKind
    a: int = 1
    b: int = 0
    alpha: int = 1
    M: Fraction = field(default=Fraction(0))

    def __post_init__(self) -> None:
        if self.kind is FMapKind.SHIFTED_LINEAR:
            if self.a < 1:
                raise DomainError(f"shifted_linear needs a >= 1, got a = {self.a}")
            # (p + b)/a > 0 for every prime p iff 2 + b > 0
            if self.b < -1:
                raise DomainError(f"(x{self.b:+d})/{self.a} is not positive at p = 2")
        if self.kind in (FMapKind.CERTIFICATE_UPPER, FMapKind.CERTIFICATE_LOWER):
            if self.alpha < 1:
                raise DomainError(f"alpha must be a positive integer, got {self.alpha}")
            if self.M < 0:
                raise DomainError(f"M must be nonnegative, got {self.M}")

    # Constructors

    @classmethod
    def identity(cls) -> "FMap":
        return cls(FMapKind.IDENTITY)

    @classmethod
    def shifted_linear(cls, a: int, b: int) -> "FMap":
        if a == 1 and b == 0:
            return cls.identity()
        return cls(FMapKind.SHIFTED_LINEAR, a=a, b=b)

    @classmethod
    def half_ceiling(cls) -> "FMap":
        return cls(FMapKind.HALF_CEILING)

    @classmethod
    def log_map(cls) -> "FMap":
        return cls(FMapKind.LOG)

    @classmethod
    def sine_abs(cls) -> "FMap":
        return cls(FMapKind.SINE_ABS)

    @classmethod
    def certificate_upper(cls, alpha: int, M: Union[int, Fraction]) -> "FMap":
        return cls(FMapKind.CERTIFICATE_UPPER, alpha=alpha, M=Fraction(M))

    @classmethod
    def certificate_lower(cls, alpha: int, M: Union[int, Fraction]) -> "FMap":
        return cls(FMapKind.CERTIFICATE_LOWER, alpha=alpha, M=Fraction(M))

    # Attributes

    @property
    def divergence(self) -> Divergence:
        if self.kind is FMapKind.SINE_ABS:
            return Divergence.NOT_DIVERGENT
        return Divergence.TENDS_TO_INFINITY

    @property
    def is_rational(self) -> bool:
        return self.kind in _RATIONAL_KINDS

    @property
    def dsl(self) -> str:
        kind = self.kind
        if kind is FMapKind.IDENTITY:
            return 'x'
        if kind is FMapKind.SHIFTED_LINEAR:
            if self.b == 0:
                return f"x/{self.a}"
            shifted = f"x{self.b:+d}"
            return shifted if self.a == 1 else f"({shifted})/{self.a}"
        if kind is FMapKind.HALF_CEILING:
            return 'ceil((x-1)/2)'
        if kind is FMapKind.LOG:
            return 'log(x)'
        if kind is FMapKind.SINE_ABS:
            return 'abs(sin(x))'
        c = _coefficient(self.alpha)
        m = _format_rational(self.M)
        if kind is FMapKind.CERTIFICATE_UPPER:
            return f"{c}x^2/({c}x+{m})"
        return f"{c}x(x-1)/({c}x+{m})"

    def __str__(self) -> str:
        return self.dsl

    # Evaluation

    def exact(self, p: int) -> Fraction:
        """f(p) as an exact rational (rational kinds only)."""
        kind = self.kind
        if kind is FMapKind.IDENTITY:
            return Fraction(p)
        if kind is FMapKind.SHIFTED_LINEAR:
            return Fraction(p + self.b, self.a)
        if kind is FMapKind.HALF_CEILING:
            return Fraction(-((1 - p) // 2))
        if kind is FMapKind.CERTIFICATE_UPPER:
            return Fraction(self.alpha * p * p) / (self.alpha * p + self.M)
        if kind is FMapKind.CERTIFICATE_LOWER:
            return Fraction(self.alpha * p * (p - 1)) / (self.alpha * p + self.M)
        raise Unsupported(f"f = {self.dsl} has no exact rational values")

    def enclose(self, p: int) -> BoundedValue:
        """f(p) as an interval at the current working precision."""
        if self.is_rational:
            return BoundedValue.exact(self.exact(p))
        if self.kind is FMapKind.LOG:
            return BoundedValue(iv.log(iv.mpf(p)))
        return BoundedValue(abs(iv.sin(iv.mpf(p))))

    def support_bound(self, x: Real) -> int:
        """An integer y such that every prime p with f(p) <= x has p <= y."""
        bound = to_fraction(x)
        if self.divergence is not Divergence.TENDS_TO_INFINITY:
            raise Unsupported(f"f = {self.dsl} has unbounded support")
        if bound < 0:
            return 1
        kind = self.kind
        if kind is FMapKind.IDENTITY:
            return math.floor(bound)
        if kind is FMapKind.SHIFTED_LINEAR:
            return math.floor(self.a * bound - self.b)
        if kind is FMapKind.HALF_CEILING:
            return 2 * math.floor(bound) + 1
        if kind is FMapKind.CERTIFICATE_UPPER:
            # f^{-1}(x) <= x + M/alpha
            return math.floor(bound + self.M / self.alpha)
        if kind is FMapKind.CERTIFICATE_LOWER:
            return math.floor(bound + 1 + self.M / self.alpha)
        # log p <= x iff p <= e^x
        return self._exp_floor(bound)

    def _exp_floor(self, bound: Fraction) -> int:
        if bound > math.log(config.max_sieve_limit) + 1:
            raise CapacityError(f"primes up to e^{float(bound):.1f} exceed the sieve capacity")
        try:
            floor, _ = escalate(
                lambda: BoundedValue(iv.exp(BoundedValue.exact(bound).interval)),
                settle_floor,
                start=config.precision,
                ceiling=config.precision_ceiling,
            )
        except PrecisionExhausted as exc:
            raise AmbiguousFloor(f"floor(exp({bound})) undecided", exc.value.floor_candidates()) from exc
        return floor

    def at_most(self, p: int, x: Real, k: int = 0) -> bool:
        """Decide f(p) * p^k <= x."""
        bound = to_fraction(x)
        if self.is_rational:
            return self.exact(p) * p ** k <= bound
        try:
            decided, _ = escalate(
                lambda: self.enclose(p) * (p ** k),
                settle_at_most(bound),
                start=config.precision,
                ceiling=config.precision_ceiling,
            )
        except PrecisionExhausted as exc:
            raise AmbiguousComparison(
                f"cannot decide {self.dsl} at p = {p} times {p}^{k} <= {bound} "
                f"at {exc.bits} bits"
            ) from exc
        return decided

    def inverse_floor(self, x: Real) -> int:
        """floor(f^{-1}(x)) from the closed-form inverse.

        Only strictly increasing bijective kinds have one; the certificate
        kinds use y = x/2 + sqrt(x^2/4 + xM/alpha) and
        y = (x+1)/2 + sqrt((x+1)^2/4 + xM/alpha), floored exactly.
        """
        bound = to_fraction(x)
        kind = self.kind
        if kind is FMapKind.IDENTITY:
            return math.floor(bound)
        if kind is FMapKind.SHIFTED_LINEAR:
            return math.floor(self.a * bound - self.b)
        if kind is FMapKind.CERTIFICATE_UPPER:
            return _floor_half_plus_root(bound, bound * bound / 4 + bound * self.M / self.alpha)
        if kind is FMapKind.CERTIFICATE_LOWER:
            shifted = bound + 1
            return _floor_half_plus_root(shifted, shifted * shifted / 4 + bound * self.M / self.alpha)
        if kind is FMapKind.LOG:
            return self._exp_floor(bound)
        raise Unsupported(f"f = {self.dsl} has no closed-form inverse")


def _floor_half_plus_root(s: Fraction, radicand: Fraction) -> int:
    """Largest integer q with q <= s/2 + sqrt(radicand), in exact arithmetic."""
    if radicand < 0:
        raise DomainError(f"negative radicand {radicand}")

    def below(q: int) -> bool:
        gap = q - s / 2
        return gap <= 0 or gap * gap <= radicand

    q = math.floor(float(s) / 2 + math.sqrt(float(radicand)))
    while below(q + 1):
        q += 1
    while not below(q):
        q -= 1
    return q


def evaluate(f: FMap, p: int, precision: Optional[int] = None) -> Union[Fraction, BoundedValue]:
    """f(p): exact for rational kinds, else an interval of width <= 2^(-precision+2)."""
    precision = precision or config.precision
    if precision < 32:
        raise DomainError(f"precision must be at least 32 bits, got {precision}")
    if f.is_rational:
        value = f.exact(p)
        if value <= 0:
            raise DomainError(f"f = {f.dsl} is not positive at p = {p}")
        return value
    with working_precision(precision + GUARD_BITS):
        value = f.enclose(p)
    if value.hi <= 0:
        raise DomainError(f"f = {f.dsl} is not positive at p = {p}")
    return value


def floor_quotient(n: int, f: FMap, p: int, k: int) -> int:
    """Exact floor(n / (f(p) p^k))."""
    if n < 0 or k < 0:
        raise DomainError(f"floor_quotient needs n >= 0 and k >= 0, got n = {n}, k = {k}")
    if n == 0:
        return 0
    if f.is_rational:
        value = f.exact(p)
        return (n * value.denominator) // (value.numerator * p ** k)
    try:
        floor, _ = escalate(
            lambda: BoundedValue.exact(n) / (f.enclose(p) * (p ** k)),
            settle_floor,
            start=config.precision,
            ceiling=config.precision_ceiling,
        )
    except PrecisionExhausted as exc:
        raise AmbiguousFloor(
            f"floor({n} / ({f.dsl} at p = {p} * {p}^{k})) is within 2^-{exc.bits} of an integer",
            exc.value.floor_candidates(),
        ) from exc
    return floor


# Map DSL

_IDENTITY = re.compile(r'x')
_SHIFT = re.compile(r'x([+-]\d+)')
_SCALED = re.compile(r'\(x([+-]\d+)?\)/(\d+)|x/(\d+)')
_HALF_CEILING = re.compile(r'ceil\(\(x-1\)/2\)')
_LOG = re.compile(r'log\(x\)')
_SINE = re.compile(r'abs\(sin\(x\)\)|\|sin\(x\)\|')
_RATIONAL = r'(\d+(?:/\d+)?)'
_UPPER = re.compile(r'(\d*)\*?x\^2/\((\d*)\*?x\+' + _RATIONAL + r'\)')
_LOWER = re.compile(r'(\d*)\*?x\*?\(x-1\)/\((\d*)\*?x\+' + _RATIONAL + r'\)')


def _certificate_alpha(numerator: str, denominator: str, text: str) -> int:
    alpha = int(numerator or 1)
    if alpha != int(denominator or 1):
        raise ParseError(f"coefficients of x differ in {text!r}")
    return alpha


def parse_fmap(text: str) -> FMap:
    """Parse a map expression such as "x-1", "ceil((x-1)/2)" or "log(x)".

    Case and whitespace are ignored.
    """
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty map expression")
    source = re.sub(r'\s+', '', text.lower()).replace('**', '^').replace('ln(', 'log(')

    try:
        if _IDENTITY.fullmatch(source):
            return FMap.identity()
        if match := _SHIFT.fullmatch(source):
            return FMap.shifted_linear(1, int(match.group(1)))
        if match := _SCALED.fullmatch(source):
            if match.group(3) is not None:
                return FMap.shifted_linear(int(match.group(3)), 0)
            return FMap.shifted_linear(int(match.group(2)), int(match.group(1) or 0))
        if _HALF_CEILING.fullmatch(source):
            return FMap.half_ceiling()
        if _LOG.fullmatch(source):
            return FMap.log_map()
        if _SINE.fullmatch(source):
            return FMap.sine_abs()
        if match := _UPPER.fullmatch(source):
            alpha = _certificate_alpha(match.group(1), match.group(2), text)
            return FMap.certificate_upper(alpha, Fraction(match.group(3)))
        if match := _LOWER.fullmatch(source):
            alpha = _certificate_alpha(match.group(1), match.group(2), text)
            return FMap.certificate_lower(alpha, Fraction(match.group(3)))
    except DomainError as exc:
        raise ParseError(str(exc)) from exc
    raise ParseError(
        f"unrecognised map {text!r}; expected one of x, x-1, (x+b)/a, ceil((x-1)/2), "
        f"log(x), abs(sin(x)), x^2/(x+M), x(x-1)/(x+M)"
    )


# Linear certificates

@dataclass(frozen=True)
class LinearCertificate:
    """(alpha, M) with 0 <= 1/f(p) - alpha/p <= M/p^2 for every prime p."""

    alpha: int
    M: Fraction

    def __post_init__(self) -> None:
        if self.alpha < 1:
            raise DomainError(f"alpha must be a positive integer, got {self.alpha}")
        if self.M < 0:
            raise DomainError(f"M must be nonnegative, got {self.M}")
        object.__setattr__(self, 'M', Fraction(self.M))

    def upper_map(self) -> FMap:
        return FMap.certificate_upper(self.alpha, self.M)

    def lower_map(self) -> FMap:
        return FMap.certificate_lower(self.alpha, self.M)


@dataclass(frozen=True)
class CertificateReport:
    passed: bool
    primes_checked: int
    witness: Optional[int] = None
    side: Optional[str] = None
    justification: Optional[str] = None
    equality_throughout: bool = False


def closed_form_justification(f: FMap, cert: LinearCertificate) -> Optional[str]:
    """Argument that the certificate holds for all primes, when one is known."""
    alpha, M = cert.alpha, cert.M
    kind = f.kind
    if kind is FMapKind.IDENTITY and alpha == 1:
        return "1/p - 1/p = 0 for every prime p"
    if kind is FMapKind.SHIFTED_LINEAR and alpha == f.a:
        if f.b == 0:
            return f"{f.a}/p - {f.a}/p = 0 for every prime p"
        if f.b == -1 and M >= 2 * f.a:
            return (f"{f.a}/(p-1) - {f.a}/p = {f.a}/(p(p-1)) <= {2 * f.a}/p^2 "
                    f"since p/(p-1) <= 2")
    if kind is FMapKind.HALF_CEILING and alpha == 2 and M >= 3:
        return ("p = 2: 1/1 - 2/2 = 0; odd p: 2/(p-1) - 2/p = 2/(p(p-1)) <= 3/p^2 "
                "since 2p/(p-1) <= 3 for p >= 3")
    if kind is FMapKind.CERTIFICATE_UPPER and alpha == 1 and M >= f.M / f.alpha:
        return f"1/f(p) - 1/p = {_format_rational(f.M / f.alpha)}/p^2 exactly"
    if kind is FMapKind.CERTIFICATE_LOWER and alpha == 1 and M >= 2 * (1 + f.M / f.alpha):
        c = _format_rational(1 + f.M / f.alpha)
        return f"1/f(p) - 1/p = {c}/(p(p-1)) <= 2*{c}/p^2 since p/(p-1) <= 2"
    return None


def _certificate_side(f: FMap, cert: LinearCertificate, p: int) -> Union[str, bool]:
    """'lower' or 'upper' for a violated side, True for equality, False otherwise."""
    upper = cert.M / (p * p)
    if f.is_rational:
        gap = 1 / f.exact(p) - Fraction(cert.alpha, p)
        if gap < 0:
            return 'lower'
        if gap > upper:
            return 'upper'
        return gap == 0

    def settle(gap: BoundedValue):
        if gap.hi < 0:
            return 'lower'
        if gap.lo > upper:
            return 'upper'
        if gap.lo >= 0 and gap.hi <= upper:
            return False
        return UNSETTLED

    try:
        side, _ = escalate(
            lambda: BoundedValue.exact(1) / f.enclose(p) - Fraction(cert.alpha, p),
            settle,
            start=config.precision,
            ceiling=config.precision_ceiling,
        )
    except PrecisionExhausted as exc:
        raise AmbiguousComparison(f"certificate check undecided at p = {p}") from exc
    return side


def verify_certificate(f: FMap, cert: LinearCertificate, bound: Optional[int] = None) -> CertificateReport:
    """Check 0 <= 1/f(p) - alpha/p <= M/p^2 for every prime p <= bound."""
    bound = bound or config.certificate_bound
    if bound < 2:
        raise DomainError(f"certificate bound must be at least 2, got {bound}")
    if f.divergence is not Divergence.TENDS_TO_INFINITY:
        raise Unsupported(f"f = {f.dsl} does not tend to infinity; no certificate applies")

    checked = 0
    equality = True
    for p in primes_up_to(bound):
        outcome = _certificate_side(f, cert, p)
        checked += 1
        if isinstance(outcome, str):
            logger.info(f"Certificate ({cert.alpha}, {cert.M}) fails for {f.dsl} at p = {p} ({outcome})")
            return CertificateReport(False, checked, witness=p, side=outcome)
        equality = equality and outcome

    return CertificateReport(
        passed=True,
        primes_checked=checked,
        justification=closed_form_justification(f, cert),
        equality_throughout=equality,
    )
