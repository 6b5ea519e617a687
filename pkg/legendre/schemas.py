"""
JSON shapes shared by the CLI (--format json) and the HTTP API.

Enclosure endpoints are decimal strings rounded outward: lo is rounded down
and hi up, so a serialized enclosure still contains the true value.
"""
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict

from .asymptotics import RowComparison, TableRow
from .bhargava import BhargavaFactorial
from .constants import ConstantResult
from .factorials import ExponentVector
from .fmap import CertificateReport
from .numeric import BoundedValue
from .verify import SuiteReport

DECIMAL_PLACES = 12


class EnclosureOut(BaseModel):
    lo: str
    hi: str
    approximate: bool = False

    @classmethod
    def of(cls, value: BoundedValue, places: int = DECIMAL_PLACES) -> "EnclosureOut":
        return cls(lo=value.lower_decimal(places), hi=value.upper_decimal(places),
                   approximate=value.approximate)


class ExponentVectorOut(BaseModel):
    f: str
    n: int
    factors: List[List[int]]

    @classmethod
    def of(cls, vector: ExponentVector) -> "ExponentVectorOut":
        return cls(**vector.to_json_obj())


class FactorialOut(BaseModel):
    f: str
    n: int
    factorization: ExponentVectorOut
    digits: int
    value: Optional[str] = None
    log: EnclosureOut


class OrderingOut(BaseModel):
    p: int
    sequence: List[int]
    step_valuations: List[int]


class BhargavaOut(BaseModel):
    set: str
    n: int
    value: str
    prime_bound: int
    valuations: Dict[str, int]
    orderings: Optional[List[OrderingOut]] = None

    @classmethod
    def of(cls, label: str, result: BhargavaFactorial, show_orderings: bool = False) -> "BhargavaOut":
        orderings = None
        if show_orderings:
            orderings = [
                OrderingOut(p=p, sequence=list(o.sequence), step_valuations=list(o.step_valuations))
                for p, o in sorted(result.orderings.items())
            ]
        return cls(
            set=label,
            n=result.n,
            value=str(result.value),
            prime_bound=result.prime_bound,
            valuations={str(p): e for p, e in result.valuations},
            orderings=orderings,
        )


class ConstantResultOut(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    name: str
    value_lo: str
    value_hi: str
    primes_used: int
    tail_bound: str
    mode: str
    cutoff: int
    target_tolerance: float
    error_estimate: Optional[float] = None

    @classmethod
    def of(cls, result: ConstantResult, places: int = DECIMAL_PLACES) -> "ConstantResultOut":
        return cls(
            name=result.name,
            value_lo=result.value.lower_decimal(places),
            value_hi=result.value.upper_decimal(places),
            primes_used=result.primes_used,
            tail_bound=result.tail_bound.upper_decimal(places),
            mode=result.mode,
            cutoff=result.cutoff,
            target_tolerance=result.target_tolerance,
            error_estimate=result.error_estimate,
        )


class TableRowOut(BaseModel):
    n: int
    argument: int
    lhs: EnclosureOut
    rhs: EnclosureOut
    residual: EnclosureOut
    lhs_printed: Optional[str] = None
    rhs_printed: Optional[str] = None
    matches: Optional[bool] = None

    @classmethod
    def of(cls, row: TableRow, comparison: Optional[RowComparison] = None) -> "TableRowOut":
        extra = {}
        if comparison is not None:
            extra = {
                'lhs_printed': comparison.lhs_text,
                'rhs_printed': comparison.rhs_text,
                'matches': comparison.matches,
            }
        return cls(n=row.n, argument=row.argument, lhs=EnclosureOut.of(row.lhs),
                   rhs=EnclosureOut.of(row.rhs), residual=EnclosureOut.of(row.residual), **extra)


class CertificateReportOut(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    passed: bool
    primes_checked: int
    witness: Optional[int] = None
    side: Optional[str] = None
    justification: Optional[str] = None
    equality_throughout: bool = False

    @classmethod
    def of(cls, report: CertificateReport) -> "CertificateReportOut":
        return cls.model_validate(report)


class CheckOut(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    name: str
    passed: bool
    detail: str = ''


class SuiteReportOut(BaseModel):
    suite: str
    seed: int
    passed: bool
    checks: List[CheckOut]

    @classmethod
    def of(cls, report: SuiteReport) -> "SuiteReportOut":
        return cls(suite=report.suite, seed=report.seed, passed=report.passed,
                   checks=[CheckOut.model_validate(c) for c in report.checks])


class ErrorOut(BaseModel):
    error: str
    detail: str
    exit_code: int
