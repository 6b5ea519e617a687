"""
Input parsing and tabular output for the CLI and the API.

Tables are rendered through pandas so that text, CSV and JSON come from the
same frame. CSV follows RFC 4180: comma separated, minimal quoting, CRLF.
"""
import json
import logging
import re
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from .asymptotics import RowComparison, TableRow
from .bhargava import IntegerSet
from .errors import ParseError

logger = logging.getLogger(__name__)

FORMATS = ('text', 'csv', 'json')

ROW_COLUMNS = ['n', 'argument', 'lhs_lo', 'lhs_hi', 'rhs_lo', 'rhs_hi', 'residual_lo', 'residual_hi']

_PRIMES_LIMIT = re.compile(r'primes\((\d+)\)')
_RANGE = re.compile(r'(\d+)\.\.(\d+)')


def _parse_integers(tokens: Sequence[str], source: str) -> List[int]:
    values = []
    for token in tokens:
        token = token.strip()
        if not token:
            continue
        try:
            values.append(int(token))
        except ValueError as exc:
            raise ParseError(f"not an integer in {source}: {token!r}") from exc
    return values


def _dedupe(values: List[int], source: str) -> List[int]:
    unique = list(dict.fromkeys(values))
    duplicates_skipped = len(values) - len(unique)
    if duplicates_skipped:
        logger.warning(f"Dropped {duplicates_skipped} duplicate elements from {source}")
    return unique


def load_integer_file(path: str) -> List[int]:
    """One integer per line; blank lines and '#' comments are ignored."""
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as exc:
        raise ParseError(f"cannot read integer set file {path}: {exc}") from exc
    lines = [line.split('#', 1)[0] for line in text.splitlines()]
    return _dedupe(_parse_integers(lines, path), path)


def parse_integer_set(text: str) -> IntegerSet:
    """'primes', 'primes(N)', '@file' or a comma-separated list of integers."""
    source = text.strip().lower()
    if source == 'primes':
        return IntegerSet.primes()
    if match := _PRIMES_LIMIT.fullmatch(source):
        return IntegerSet.primes(int(match.group(1)))
    if source.startswith('@'):
        values = load_integer_file(text.strip()[1:])
    else:
        values = _dedupe(_parse_integers(source.split(','), 'set'), 'set')
    if not values:
        raise ParseError(f"empty integer set {text!r}")
    return IntegerSet.explicit(values)


def parse_rows(text: str) -> List[int]:
    """'1..10,100,1000' -> [1, ..., 10, 100, 1000], order kept, duplicates dropped."""
    rows: List[int] = []
    for part in text.split(','):
        part = part.strip()
        if not part:
            continue
        if match := _RANGE.fullmatch(part):
            low, high = int(match.group(1)), int(match.group(2))
            if low > high:
                raise ParseError(f"empty row range {part!r}")
            rows.extend(range(low, high + 1))
            continue
        rows.extend(_parse_integers([part], 'rows'))
    if not rows:
        raise ParseError(f"no rows in {text!r}")
    if any(n < 0 for n in rows):
        raise ParseError(f"rows must be nonnegative: {text!r}")
    return _dedupe(rows, 'rows')


def decimal_digits(value: int) -> int:
    """Number of decimal digits of |value|, without converting to a string."""
    value = abs(value)
    if value < 10:
        return 1
    estimate = int(value.bit_length() * 0.30102999566398120)
    return estimate + 1 if value >= 10 ** estimate else estimate


def decimal_string(value: int, digit_cap: int) -> Optional[str]:
    """The decimal expansion, or None when it has more than digit_cap digits."""
    if decimal_digits(value) > digit_cap:
        return None
    # Python 3.11+ caps int -> str conversions unless raised explicitly
    if hasattr(sys, 'set_int_max_str_digits'):
        limit = sys.get_int_max_str_digits()
        if limit and digit_cap > limit:
            sys.set_int_max_str_digits(digit_cap)
    return str(value)


def format_decimal(text: str) -> str:
    """'94417.8375' -> '94,417.8375'."""
    whole, _, fraction = text.partition('.')
    sign = '-' if whole.startswith('-') else ''
    grouped = f"{int(whole.lstrip('-')):,}"
    return f"{sign}{grouped}.{fraction}" if fraction else f"{sign}{grouped}"


def rows_frame(rows: Sequence[TableRow], places: int = 4) -> pd.DataFrame:
    records = []
    for row in rows:
        records.append({
            'n': row.n,
            'argument': row.argument,
            'lhs_lo': row.lhs.lower_decimal(places),
            'lhs_hi': row.lhs.upper_decimal(places),
            'rhs_lo': row.rhs.lower_decimal(places),
            'rhs_hi': row.rhs.upper_decimal(places),
            'residual_lo': row.residual.lower_decimal(places),
            'residual_hi': row.residual.upper_decimal(places),
        })
    return pd.DataFrame.from_records(records, columns=ROW_COLUMNS)


def comparisons_frame(comparisons: Sequence[RowComparison], places: int = 4) -> pd.DataFrame:
    frame = rows_frame([c.row for c in comparisons], places)
    frame['lhs_printed'] = [c.lhs_text for c in comparisons]
    frame['rhs_printed'] = [c.rhs_text for c in comparisons]
    frame['lhs_match'] = [c.lhs_matches for c in comparisons]
    frame['rhs_match'] = [c.rhs_matches for c in comparisons]
    return frame


def render_frame(frame: pd.DataFrame, output_format: str) -> str:
    if output_format == 'csv':
        return frame.to_csv(index=False, lineterminator='\r\n')
    if output_format == 'json':
        return json.dumps(frame.to_dict(orient='records'), indent=2) + '\n'
    if output_format == 'text':
        return frame.to_string(index=False) + '\n'
    raise ParseError(f"unknown format {output_format!r}; choose from {FORMATS}")


def render_mapping(data: Dict[str, Any], output_format: str) -> str:
    """Key/value output for single results (factorials, constants)."""
    if output_format == 'json':
        return json.dumps(data, indent=2) + '\n'
    if output_format == 'csv':
        frame = pd.DataFrame({'field': list(data), 'value': [_scalar(v) for v in data.values()]})
        return frame.to_csv(index=False, lineterminator='\r\n')
    if output_format == 'text':
        width = max((len(key) for key in data), default=0)
        return ''.join(f"{key.ljust(width)}  {_scalar(value)}\n" for key, value in data.items())
    raise ParseError(f"unknown format {output_format!r}; choose from {FORMATS}")


def _scalar(value: Any) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(value, separators=(',', ':'))
    return '' if value is None else str(value)
