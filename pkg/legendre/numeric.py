"""
Guaranteed enclosures of real numbers.

BoundedValue wraps an mpmath interval. Arithmetic runs in mpmath's interval
context, which rounds every endpoint outward, so the true value stays inside
the enclosure. Endpoints are read back as exact Fractions for comparisons.
"""
import logging
import math
import os
import threading
from contextlib import contextmanager
from fractions import Fraction
from typing import Any, Callable, Iterator, Tuple, Union

from mpmath import iv, mp
from mpmath.libmp import fzero

from .errors import DomainError

logger = logging.getLogger(__name__)

Real = Union[int, Fraction, float, str]

UNSETTLED = object()

# mpmath keeps one precision per process; blocks that change it run one thread at a time.
_precision_lock = threading.RLock()


def _reset_precision_lock() -> None:
    global _precision_lock
    _precision_lock = threading.RLock()


os.register_at_fork(after_in_child=_reset_precision_lock)


class PrecisionExhausted(Exception):
    """Raised by escalate() when the precision ceiling is reached unsettled."""

    def __init__(self, value: "BoundedValue", bits: int):
        self.value = value
        self.bits = bits
        super().__init__(f"unsettled at {bits} bits: {value}")


@contextmanager
def working_precision(bits: int) -> Iterator[int]:
    """Set the interval (and point) precision for the duration of a block.

    Holds a process-wide reentrant lock while the block runs, so concurrent
    threads never see each other's precision. Nesting in one thread is fine.
    """
    with _precision_lock:
        saved_iv, saved_mp = iv.prec, mp.prec
        iv.prec = bits
        mp.prec = bits
        try:
            yield bits
        finally:
            iv.prec = saved_iv
            mp.prec = saved_mp


def to_fraction(value: Real) -> Fraction:
    """Exact rational value of an int, float, Fraction or decimal string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"not a real number: {value!r}")
    if isinstance(value, (int, float)):
        if isinstance(value, float) and not math.isfinite(value):
            raise DomainError(f"not a finite real: {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.replace(',', '').strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a real number: {value!r}") from exc
    raise DomainError(f"not a real number: {value!r}")


def _raw_to_fraction(raw: Tuple[Any, ...]) -> Fraction:
    sign, man, exp, _ = raw
    if not man:
        if raw == fzero:
            return Fraction(0)
        raise DomainError("interval endpoint is not finite")
    value = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -value if sign else value


def _interval(value: Any) -> Any:
    if isinstance(value, BoundedValue):
        return value.interval
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return iv.mpf(value.numerator)
        return iv.mpf(value.numerator) / iv.mpf(value.denominator)
    if isinstance(value, str):
        return _interval(to_fraction(value))
    return iv.mpf(value)


def _format_fixed(value: Fraction, places: int, upward: bool) -> str:
    scaled = value * 10 ** places
    whole = math.ceil(scaled) if upward else math.floor(scaled)
    sign = '-' if whole < 0 else ''
    digits = str(abs(whole)).rjust(places + 1, '0')
    if places == 0:
        return f"{sign}{digits}"
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def display_precision(text: str) -> Tuple[Fraction, int]:
    """Value and number of significant decimals of a printed number.

    Thousands separators and trailing zeros after the point are dropped, so
    "43,726.0000" is read as 43726 with zero decimals.
    """
    cleaned = text.replace(',', '').strip()
    value = to_fraction(cleaned)
    if '.' not in cleaned:
        return value, 0
    decimals = cleaned.split('.', 1)[1].rstrip('0')
    return value, len(decimals)


class BoundedValue:
    """A real number known to lie in [lo, hi]."""

    __slots__ = ('interval', 'approximate', '_endpoints')

    def __init__(self, interval: Any, approximate: bool = False):
        self.interval = interval
        self.approximate = approximate
        self._endpoints = None

    # Construction

    @classmethod
    def exact(cls, value: Real) -> "BoundedValue":
        return cls(_interval(to_fraction(value)))

    @classmethod
    def zero(cls) -> "BoundedValue":
        return cls(iv.mpf(0))

    @classmethod
    def log(cls, value: Union[int, Fraction]) -> "BoundedValue":
        if value <= 0:
            raise DomainError(f"log of non-positive value {value}")
        return cls(iv.log(_interval(value)))

    @classmethod
    def from_endpoints(cls, lo: Real, hi: Real, approximate: bool = False) -> "BoundedValue":
        lo_f, hi_f = to_fraction(lo), to_fraction(hi)
        if lo_f > hi_f:
            raise DomainError(f"empty enclosure [{lo_f}, {hi_f}]")
        lower = _interval(lo_f)._mpi_[0]
        upper = _interval(hi_f)._mpi_[1]
        return cls(iv.make_mpf((lower, upper)), approximate)

    @classmethod
    def hull(cls, first: "BoundedValue", second: "BoundedValue") -> "BoundedValue":
        return cls.from_endpoints(min(first.lo, second.lo), max(first.hi, second.hi),
                                  first.approximate or second.approximate)

    # Endpoints

    def endpoints(self) -> Tuple[Fraction, Fraction]:
        if self._endpoints is None:
            lower, upper = self.interval._mpi_
            self._endpoints = (_raw_to_fraction(lower), _raw_to_fraction(upper))
        return self._endpoints

    @property
    def lo(self) -> Fraction:
        return self.endpoints()[0]

    @property
    def hi(self) -> Fraction:
        return self.endpoints()[1]

    @property
    def width(self) -> Fraction:
        lo, hi = self.endpoints()
        return hi - lo

    @property
    def mid(self) -> Fraction:
        lo, hi = self.endpoints()
        return (lo + hi) / 2

    def floor_candidates(self) -> Tuple[int, int]:
        lo, hi = self.endpoints()
        return math.floor(lo), math.floor(hi)

    def is_exact(self) -> bool:
        return self.width == 0

    # Predicates

    def contains(self, value: Union[Real, "BoundedValue"]) -> bool:
        lo, hi = self.endpoints()
        if isinstance(value, BoundedValue):
            return lo <= value.lo and value.hi <= hi
        point = to_fraction(value)
        return lo <= point <= hi

    def overlaps(self, other: "BoundedValue") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def matches_display(self, text: str) -> bool:
        """True when the printed number is a rounding or a truncation of some
        value inside the enclosure, at the printed number of decimals."""
        shown, decimals = display_precision(text)
        unit = Fraction(1, 10 ** decimals)
        return self.lo < shown + unit and self.hi >= shown - unit / 2

    # Arithmetic

    def _combine(self, other: Any, result: Any) -> "BoundedValue":
        approximate = self.approximate or (isinstance(other, BoundedValue) and other.approximate)
        return BoundedValue(result, approximate)

    def __add__(self, other: Any) -> "BoundedValue":
        return self._combine(other, self.interval + _interval(other))

    __radd__ = __add__

    def __sub__(self, other: Any) -> "BoundedValue":
        return self._combine(other, self.interval - _interval(other))

    def __rsub__(self, other: Any) -> "BoundedValue":
        return self._combine(other, _interval(other) - self.interval)

    def __mul__(self, other: Any) -> "BoundedValue":
        return self._combine(other, self.interval * _interval(other))

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "BoundedValue":
        return self._combine(other, self.interval / _interval(other))

    def __neg__(self) -> "BoundedValue":
        return BoundedValue(-self.interval, self.approximate)

    def __abs__(self) -> "BoundedValue":
        return BoundedValue(abs(self.interval), self.approximate)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BoundedValue):
            return NotImplemented
        return self.endpoints() == other.endpoints()

    def __hash__(self) -> int:
        return hash(self.endpoints())

    def __float__(self) -> float:
        return float(self.mid)

    # Rendering

    def lower_decimal(self, places: int = 12) -> str:
        return _format_fixed(self.lo, places, upward=False)

    def upper_decimal(self, places: int = 12) -> str:
        return _format_fixed(self.hi, places, upward=True)

    def mid_decimal(self, places: int = 4) -> str:
        return _format_fixed(self.mid, places, upward=False)

    def __str__(self) -> str:
        return f"[{self.lower_decimal()}, {self.upper_decimal()}]"

    def __repr__(self) -> str:
        flag = ', approximate' if self.approximate else ''
        return f"BoundedValue({self}{flag})"


def interval_sum(values: Iterator[Any]) -> BoundedValue:
    """Sum in iteration order; the order is part of the result's identity."""
    total = iv.mpf(0)
    for value in values:
        total = total + _interval(value)
    return BoundedValue(total)


def escalate(evaluate: Callable[[], BoundedValue],
             settle: Callable[[BoundedValue], Any],
             *, start: int, ceiling: int) -> Tuple[Any, BoundedValue]:
    """Re-evaluate at doubling precision until settle() accepts the value.

    settle returns UNSETTLED to ask for more bits. Raises PrecisionExhausted
    at the ceiling.
    """
    bits = start
    while True:
        with working_precision(bits):
            value = evaluate()
            outcome = settle(value)
        if outcome is not UNSETTLED:
            return outcome, value
        if bits >= ceiling:
            raise PrecisionExhausted(value, bits)
        logger.debug(f"Escalating precision {bits} -> {min(2 * bits, ceiling)} bits")
        bits = min(2 * bits, ceiling)


def settle_floor(value: BoundedValue) -> Any:
    low, high = value.floor_candidates()
    return low if low == high else UNSETTLED


def settle_at_most(bound: Fraction) -> Callable[[BoundedValue], Any]:
    """Settle 'value <= bound' once the enclosure lies on one side."""
    def settle(value: BoundedValue) -> Any:
        if value.hi <= bound:
            return True
        if value.lo > bound:
            return False
        return UNSETTLED
    return settle
