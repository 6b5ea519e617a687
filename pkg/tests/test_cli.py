import io
import json

import pytest

from legendre.cli import build_parser, main
from legendre.config import config
from legendre.errors import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION, ParseError


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


class TestParser:
    def test_usage_errors_raise(self):
        with pytest.raises(ParseError):
            build_parser().parse_args(['ffact', '--n', '3'])

    def test_missing_command(self, capsys):
        code, _ = run()
        assert code == EXIT_USAGE
        assert 'error:' in capsys.readouterr().err

    def test_help(self, capsys):
        code, _ = run('--help')
        assert code == EXIT_OK
        assert 'ffact' in capsys.readouterr().out


class TestFfact:
    def test_log_map(self):
        code, out = run('ffact', '--f', 'log(x)', '--n', '3')
        assert code == EXIT_OK
        assert '1862340480' in out
        assert 'log(x)' in out

    def test_json(self):
        code, out = run('ffact', '--f', 'x-1', '--n', '5', '--format', 'json')
        payload = json.loads(out)
        assert code == EXIT_OK
        assert payload['value'] == '11520'
        assert payload['factorization']['factors'] == [[2, 8], [3, 2], [5, 1]]
        assert payload['digits'] == 5

    def test_digit_cap(self):
        code, out = run('ffact', '--f', 'x', '--n', '100', '--digit-cap', '10')
        assert code == EXIT_OK
        assert '(158 digits, over the digit cap of 10)' in out

    def test_csv(self):
        code, out = run('ffact', '--f', 'x', '--n', '5', '--format', 'csv')
        assert code == EXIT_OK
        assert out.startswith('field,value\r\n')
        assert 'value,120\r\n' in out

    def test_divergent_map(self, capsys):
        code, out = run('ffact', '--f', 'abs(sin(x))', '--n', '1')
        assert code == EXIT_DOMAIN
        assert out == ''
        assert 'is not defined' in capsys.readouterr().err

    def test_bad_map(self):
        assert run('ffact', '--f', 'x^3', '--n', '1')[0] == EXIT_USAGE

    def test_bad_precision(self):
        assert run('ffact', '--f', 'x', '--n', '1', '--precision', '8')[0] == EXIT_USAGE

    def test_output_is_deterministic(self):
        assert run('ffact', '--f', 'ceil((x-1)/2)', '--n', '40') == run('ffact', '--f', 'ceil((x-1)/2)', '--n', '40')


class TestBhargava:
    def test_primes(self):
        code, out = run('bhargava', '--set', 'primes', '--n', '5')
        assert code == EXIT_OK
        assert '5760' in out
        assert '2^7 * 3^2 * 5^1' in out

    def test_explicit_set(self):
        code, out = run('bhargava', '--set', '0,1,2,3,4,5', '--n', '5', '--format', 'json')
        assert code == EXIT_OK
        assert json.loads(out)['value'] == '120'

    def test_orderings(self):
        code, out = run('bhargava', '--set', 'primes', '--n', '3', '--show-orderings')
        assert code == EXIT_OK
        assert '24' in out
        assert '2 3 5 7' in out
        assert '5^0' in out
        assert '7^0' not in out

    def test_set_too_small(self):
        assert run('bhargava', '--set', '0,1', '--n', '3')[0] == EXIT_DOMAIN


class TestConstant:
    def test_identity_beta_f(self):
        code, out = run('constant', 'beta_f', '--f', 'x', '--alpha', '1', '--M', '0', '--tol', '1e-9',
                        '--format', 'json')
        payload = json.loads(out)
        assert code == EXIT_OK
        assert payload['value_lo'] == payload['value_hi'] == '0.000000000000'

    def test_accelerated_C(self):
        code, out = run('constant', 'C', '--mode', 'accelerated', '--format', 'json')
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload['mode'] == 'accelerated'
        assert payload['value_lo'].startswith('1.226968')

    def test_rigorous_C_text(self):
        code, out = run('constant', 'C', '--tol', '1e-2')
        assert code == EXIT_OK
        assert 'rigorous' in out

    def test_threads_flag(self):
        run('constant', 'C', '--tol', '1e-2', '--threads', '2')
        assert config.threads == 2

    def test_beta_f_needs_certificate(self):
        assert run('constant', 'beta_f', '--f', 'x-1')[0] == EXIT_USAGE
        assert run('constant', 'beta_f', '--f', 'x-1', '--alpha', '1', '--M', 'two')[0] == EXIT_USAGE

    def test_failing_certificate(self):
        code, _ = run('constant', 'beta_f', '--f', 'x-1', '--alpha', '1', '--M', '1', '--tol', '1e-3')
        assert code == EXIT_VERIFICATION


class TestTable:
    def test_table_two_first_row(self):
        code, out = run('table', '2', '--rows', '1', '--no-cross-check')
        assert code == EXIT_OK
        assert '1.7917' in out
        assert '1.7607' in out

    def test_table_one_json(self):
        code, out = run('table', '1', '--rows', '1..3', '--format', 'json', '--no-cross-check')
        records = json.loads(out)
        assert code == EXIT_OK
        assert [r['n'] for r in records] == [1, 2, 3]
        assert all(r['matches'] for r in records)

    def test_aliased_row_adds_true_n(self):
        code, out = run('table', '1', '--rows', '100', '--format', 'json', '--no-cross-check')
        records = json.loads(out)
        assert code == EXIT_OK
        assert [(r['n'], r['argument']) for r in records] == [(100, 99), (100, 100)]
        assert records[1]['matches'] is None

    def test_unprinted_rows(self):
        code, out = run('table', '1', '--rows', '20', '--format', 'csv', '--no-cross-check')
        assert code == EXIT_OK
        assert out.splitlines()[0] == 'n,argument,lhs_lo,lhs_hi,rhs_lo,rhs_hi,residual_lo,residual_hi'
        assert out.endswith('\r\n')

    def test_cross_check_is_on_by_default(self):
        parser = build_parser()
        assert parser.parse_args(['table', '1']).cross_check is True
        assert parser.parse_args(['table', '1', '--no-cross-check']).cross_check is False

    def test_bad_rows(self):
        assert run('table', '1', '--rows', '5..2')[0] == EXIT_USAGE
        assert run('table', '3')[0] == EXIT_USAGE


class TestOtherCommands:
    def test_verify(self):
        code, out = run('verify', 'bhargava', '--seed', '7')
        assert code == EXIT_OK
        assert out.startswith('# verify bhargava seed 7\n')
        assert 'FAIL' not in out

    def test_verify_json(self):
        code, out = run('verify', 'bhargava', '--format', 'json')
        assert code == EXIT_OK
        assert json.loads(out)[0]['passed'] is True

    def test_a202367(self):
        code, out = run('a202367', '--count', '6', '--format', 'csv')
        assert code == EXIT_OK
        assert out.splitlines()[-1] == '6,359251200'

    def test_certificate(self):
        code, out = run('certificate', '--f', 'ceil((x-1)/2)', '--alpha', '2', '--M', '4', '--bound', '1000')
        assert code == EXIT_OK
        assert 'passed' in out

    def test_failed_certificate(self):
        code, out = run('certificate', '--f', 'x-1', '--alpha', '1', '--M', '1', '--format', 'json')
        assert code == EXIT_VERIFICATION
        assert json.loads(out)['witness'] == 2

    def test_cache_flags(self, tmp_path):
        code, _ = run('ffact', '--f', 'x', '--n', '5', '--no-cache', '--cache-dir', str(tmp_path))
        assert code == EXIT_OK
        assert config.cache_dir == tmp_path
        assert not config.cache_enabled
