"""
Command-line interface.

    legendre ffact --f "log(x)" --n 3
    legendre bhargava --set primes --n 5 --show-orderings
    legendre constant C --tol 1e-5 --mode rigorous
    legendre table 1 --rows 1..10,100
    legendre verify all --seed 42

stdout carries only the result; logs and errors go to stderr. Exit codes:
0 success, 1 usage error, 2 domain error, 3 verification failure.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, TextIO

import pandas as pd

from .asymptotics import REFERENCE_ROWS, TABLES, a202367_sequence, reproduce_table, table
from .bhargava import bhargava_factorial
from .config import config
from .constants import ACCELERATED, MODES, RIGOROUS, beta_f, constant_beta, constant_C
from .errors import EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION, DomainError, LegendreError, ParseError
from .factorials import factorial, log_factorial
from .fmap import LinearCertificate, parse_fmap, verify_certificate
from .formats import (
    FORMATS,
    comparisons_frame,
    decimal_digits,
    decimal_string,
    parse_integer_set,
    parse_rows,
    render_frame,
    render_mapping,
    rows_frame,
)
from .logging_config import setup_logging
from .numeric import to_fraction
from .primes import prime_source
from .schemas import (
    BhargavaOut,
    CertificateReportOut,
    ConstantResultOut,
    EnclosureOut,
    ExponentVectorOut,
    FactorialOut,
    SuiteReportOut,
    TableRowOut,
)
from .verify import SUITES, run_suites

logger = logging.getLogger(__name__)

PROG = 'legendre'


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors raised as ParseError instead of exiting."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ParseError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    """Per-run overrides of the environment settings."""

    command: str
    output_format: str = 'text'
    precision: Optional[int] = None
    seed: int = 0
    threads: Optional[int] = None
    use_cache: bool = True
    cache_dir: Optional[str] = None
    digit_cap: Optional[int] = None
    log_level: Optional[str] = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        return cls(
            command=args.command,
            output_format=args.format,
            precision=args.precision,
            seed=args.seed,
            threads=args.threads,
            use_cache=not args.no_cache,
            cache_dir=args.cache_dir,
            digit_cap=args.digit_cap,
            log_level=args.log_level,
        )

    def apply(self) -> None:
        if self.precision is not None:
            if self.precision < 32:
                raise ParseError(f"--precision must be at least 32 bits, got {self.precision}")
            config.precision = self.precision
            config.precision_ceiling = max(config.precision_ceiling, self.precision)
        if self.threads is not None:
            if self.threads < 1:
                raise ParseError(f"--threads must be positive, got {self.threads}")
            config.threads = self.threads
        if self.digit_cap is not None:
            config.digit_cap = self.digit_cap
        if self.cache_dir is not None:
            config.cache_dir = Path(self.cache_dir)
            prime_source().clear()
        if not self.use_cache:
            config.cache_enabled = False


def _common_flags() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument('--precision', type=int, help='working precision in bits (default 64)')
    common.add_argument('--format', choices=FORMATS, default='text', help='output format')
    common.add_argument('--seed', type=int, default=0, help='seed for randomized checks')
    common.add_argument('--threads', type=int, help='worker processes for prime sums')
    common.add_argument('--no-cache', action='store_true', help='do not read or write the prime cache')
    common.add_argument('--cache-dir', help='prime cache directory (overrides LEGENDRE_CACHE_DIR)')
    common.add_argument('--digit-cap', type=int, help='largest integer printed in full, in digits')
    common.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='log level')
    return common


def build_parser() -> ArgumentParser:
    common = _common_flags()
    parser = ArgumentParser(prog=PROG, description='Generalized factorials, Bhargava factorials and prime-sum constants.')
    commands = parser.add_subparsers(dest='command', required=True, parser_class=ArgumentParser)

    ffact = commands.add_parser('ffact', parents=[common], help='n!_f from the Legendre-type formula')
    ffact.add_argument('--f', required=True, help='map expression, e.g. "x-1" or "log(x)"')
    ffact.add_argument('--n', type=int, required=True)

    bhargava = commands.add_parser('bhargava', parents=[common], help='n!_S from p-orderings')
    bhargava.add_argument('--set', required=True, help='"primes", "primes(N)", "@file" or "0,1,2,..."')
    bhargava.add_argument('--n', type=int, required=True)
    bhargava.add_argument('--prime-bound', type=int, help='largest prime considered (default from the set)')
    bhargava.add_argument('--show-orderings', action='store_true', help='print each p-ordering')

    constant = commands.add_parser('constant', parents=[common], help='C, beta or beta_f with an enclosure')
    constant.add_argument('name', choices=['C', 'beta', 'beta_f'])
    constant.add_argument('--tol', type=float, default=1e-5)
    constant.add_argument('--mode', choices=MODES, default=RIGOROUS)
    constant.add_argument('--f', help='map expression (beta_f only)')
    constant.add_argument('--alpha', type=int, help='certificate alpha (beta_f only)')
    constant.add_argument('--M', help='certificate M, integer or p/q (beta_f only)')

    tables = commands.add_parser('table', parents=[common], help='reproduce a reference table')
    tables.add_argument('which', type=int, choices=sorted(TABLES))
    tables.add_argument('--rows', help='e.g. "1..10,100,1000" (default: the reference rows)')
    tables.add_argument('--beta-mode', choices=MODES, default=ACCELERATED)
    tables.add_argument('--cross-check', action=argparse.BooleanOptionalAction, default=True,
                        help='check accelerated beta_f against the rigorous one')
    tables.add_argument('--stirling', action='store_true', help='Stirling approximation for log (alpha n)!')

    verify = commands.add_parser('verify', parents=[common], help='run property suites')
    verify.add_argument('suite', choices=SUITES + ('all',))

    sequence = commands.add_parser('a202367', parents=[common], help='terms of A202367 from the half-ceiling formula')
    sequence.add_argument('--count', type=int, default=6)

    certificate = commands.add_parser('certificate', parents=[common], help='check a linear certificate')
    certificate.add_argument('--f', required=True)
    certificate.add_argument('--alpha', type=int, required=True)
    certificate.add_argument('--M', required=True)
    certificate.add_argument('--bound', type=int, help='largest prime checked')

    return parser


def _certificate(args: argparse.Namespace) -> LinearCertificate:
    if args.alpha is None or args.M is None:
        raise ParseError('--alpha and --M are required')
    try:
        M = to_fraction(args.M)
    except DomainError as exc:
        raise ParseError(f"--M must be an integer or p/q, got {args.M!r}") from exc
    return LinearCertificate(args.alpha, M)


def _emit(out: TextIO, text: str) -> None:
    out.write(text)


def cmd_ffact(args: argparse.Namespace, run: RunConfig, out: TextIO) -> int:
    f = parse_fmap(args.f)
    vector, value = factorial(f, args.n)
    log_value = log_factorial(f, args.n)
    result = FactorialOut(
        f=f.dsl,
        n=args.n,
        factorization=ExponentVectorOut.of(vector),
        digits=decimal_digits(value),
        value=decimal_string(value, config.digit_cap),
        log=EnclosureOut.of(log_value),
    )
    if run.output_format == 'json':
        _emit(out, result.model_dump_json(indent=2) + '\n')
        return EXIT_OK
    shown = result.value
    if shown is None:
        shown = f"({result.digits} digits, over the digit cap of {config.digit_cap})"
    _emit(out, render_mapping({
        'f': f.dsl,
        'n': args.n,
        'factors': json.dumps(vector.to_json_obj(), separators=(',', ':')),
        'digits': result.digits,
        'value': shown,
        'log': str(log_value),
    }, run.output_format))
    return EXIT_OK


def cmd_bhargava(args: argparse.Namespace, run: RunConfig, out: TextIO) -> int:
    S = parse_integer_set(args.set)
    result = bhargava_factorial(S, args.n, args.prime_bound)
    payload = BhargavaOut.of(S.label, result, args.show_orderings)
    if run.output_format == 'json':
        _emit(out, payload.model_dump_json(indent=2, exclude_none=True) + '\n')
        return EXIT_OK
    _emit(out, render_mapping({
        'set': S.label,
        'n': args.n,
        'value': payload.value,
        'prime_bound': payload.prime_bound,
        'valuations': ' * '.join(f"{p}^{e}" for p, e in result.valuations) or '1',
    }, run.output_format))
    if args.show_orderings:
        frame = pd.DataFrame.from_records(
            [{'p': o.p, 'v_n': f"{o.p}^{o.step_valuations[-1]}",
              'sequence': ' '.join(str(a) for a in o.sequence)} for o in payload.orderings or []],
            columns=['p', 'v_n', 'sequence'],
        )
        _emit(out, render_frame(frame, run.output_format))
    return EXIT_OK


def cmd_constant(args: argparse.Namespace, run: RunConfig, out: TextIO) -> int:
    if args.name == 'C':
        result = constant_C(args.tol, args.mode, config.threads, config.precision)
    elif args.name == 'beta':
        result = constant_beta(args.tol, args.mode, config.threads, config.precision)
    else:
        if args.f is None:
            raise ParseError('beta_f needs --f')
        result = beta_f(parse_fmap(args.f), _certificate(args), args.tol, args.mode,
                        config.threads, config.precision)
    payload = ConstantResultOut.of(result)
    if run.output_format == 'json':
        _emit(out, payload.model_dump_json(indent=2) + '\n')
    else:
        _emit(out, render_mapping(payload.model_dump(), run.output_format))
    return EXIT_OK


def cmd_table(args: argparse.Namespace, run: RunConfig, out: TextIO) -> int:
    spec = TABLES[args.which]
    rows = parse_rows(args.rows) if args.rows else list(REFERENCE_ROWS)
    printed = all(n in spec.reference for n in rows) and not args.stirling

    if printed:
        comparisons = reproduce_table(args.which, rows, args.beta_mode, args.cross_check, config.precision)
        aliased = [c.row.n for c in comparisons if c.row.argument != c.row.n]
        extra = table(spec.f, spec.cert, aliased, spec.shift, beta_mode=args.beta_mode) if aliased else []
        if run.output_format == 'json':
            records = [TableRowOut.of(c.row, c).model_dump() for c in comparisons]
            records += [TableRowOut.of(row).model_dump() for row in extra]
            _emit(out, json.dumps(records, indent=2) + '\n')
        else:
            frame = comparisons_frame(comparisons)
            if extra:
                frame = pd.concat([frame, rows_frame(extra)], ignore_index=True)
            _emit(out, render_frame(frame, run.output_format))
        failed = [c.row.n for c in comparisons if not c.matches]
        if failed:
            logger.error(f"Table {args.which}: rows {failed} do not match the printed values")
            return EXIT_VERIFICATION
        return EXIT_OK

    computed = table(spec.f, spec.cert, rows, spec.shift, beta_mode=args.beta_mode,
                     cross_check=args.cross_check, precision=config.precision, stirling=args.stirling)
    if run.output_format == 'json':
        _emit(out, json.dumps([TableRowOut.of(row).model_dump() for row in computed], indent=2) + '\n')
    else:
        _emit(out, render_frame(rows_frame(computed), run.output_format))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, run: RunConfig, out: TextIO) -> int:
    logger.info(f"verify {args.suite} with seed {run.seed}")
    reports = run_suites(args.suite, run.seed)
    if run.output_format == 'json':
        _emit(out, json.dumps([SuiteReportOut.of(r).model_dump() for r in reports], indent=2) + '\n')
    else:
        if run.output_format == 'text':
            _emit(out, f"# verify {args.suite} seed {run.seed}\n")
        frame = pd.DataFrame.from_records(
            [{'suite': r.suite, 'check': c.name, 'result': 'PASS' if c.passed else 'FAIL', 'detail': c.detail}
             for r in reports for c in r.checks],
            columns=['suite', 'check', 'result', 'detail'],
        )
        _emit(out, render_frame(frame, run.output_format))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFICATION


def cmd_a202367(args: argparse.Namespace, run: RunConfig, out: TextIO) -> int:
    terms = a202367_sequence(args.count)
    frame = pd.DataFrame({'n': range(1, len(terms) + 1), 'value': [str(t) for t in terms]})
    _emit(out, render_frame(frame, run.output_format))
    return EXIT_OK


def cmd_certificate(args: argparse.Namespace, run: RunConfig, out: TextIO) -> int:
    f = parse_fmap(args.f)
    report = verify_certificate(f, _certificate(args), args.bound)
    payload = CertificateReportOut.of(report)
    if run.output_format == 'json':
        _emit(out, payload.model_dump_json(indent=2) + '\n')
    else:
        _emit(out, render_mapping({'f': f.dsl, **payload.model_dump()}, run.output_format))
    return EXIT_OK if report.passed else EXIT_VERIFICATION


COMMANDS = {
    'ffact': cmd_ffact,
    'bhargava': cmd_bhargava,
    'constant': cmd_constant,
    'table': cmd_table,
    'verify': cmd_verify,
    'a202367': cmd_a202367,
    'certificate': cmd_certificate,
}


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        run = RunConfig.from_args(args)
        setup_logging(run.log_level)
        run.apply()
        return COMMANDS[run.command](args, run, out)
    except LegendreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except SystemExit as exc:
        # --help
        if exc.code is None:
            return EXIT_OK
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
