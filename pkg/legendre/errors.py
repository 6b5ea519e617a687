"""
Error hierarchy shared by the library, the CLI and the HTTP API.

Every error carries the process exit code the CLI maps it to.
"""
from typing import Any, Optional, Sequence

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_VERIFICATION = 3


class LegendreError(Exception):
    """Base class for all library errors."""

    exit_code = EXIT_DOMAIN
    http_status = 422


class ParseError(LegendreError, ValueError):
    """A map expression, integer set or row list could not be parsed."""

    exit_code = EXIT_USAGE
    http_status = 400


class DomainError(LegendreError, ValueError):
    """An argument lies outside the domain of the operation."""


class CapacityError(LegendreError):
    """A sieve or buffer request exceeds the configured capacity."""


class DivergentFactorial(LegendreError):
    """The map does not tend to infinity along the primes, so n!_f is undefined."""

    def __init__(self, descriptor: str, n: int):
        self.descriptor = descriptor
        self.n = n
        super().__init__(
            f"{n}!_f is not defined for f = {descriptor}: f does not tend to infinity "
            f"along the primes, so infinitely many primes p satisfy f(p) <= {n}"
        )


class AmbiguousFloor(LegendreError):
    """The floor of a quotient could not be decided at the precision ceiling."""

    def __init__(self, message: str, candidates: Sequence[int]):
        self.candidates = tuple(candidates)
        super().__init__(f"{message} (candidates {list(self.candidates)})")


class AmbiguousComparison(LegendreError):
    """An inequality f(p) <= x could not be decided at the precision ceiling."""


class TruncationTooSmall(LegendreError):
    """The materialized set has fewer elements than the requested ordering length."""


class UnstableTruncation(LegendreError):
    """Enlarging the set truncation or the prime bound changed a valuation."""


class Unsupported(LegendreError):
    """The operation has no implementation for this kind of map."""


class BudgetExceeded(LegendreError):
    """The target tolerance needs more primes than the configured budget allows."""

    def __init__(self, message: str, best: Optional[Any] = None):
        self.best = best
        super().__init__(message)


class ViolatedDivisibility(LegendreError):
    """A generalized binomial coefficient came out non-integral."""

    exit_code = EXIT_VERIFICATION
    http_status = 500


class VerificationFailed(LegendreError):
    """A property check or a cross-check between two computations failed."""

    exit_code = EXIT_VERIFICATION
    http_status = 500
