import json
import logging
from fractions import Fraction

import pandas as pd
import pytest

from legendre.asymptotics import reproduce_table, table
from legendre.errors import ParseError
from legendre.fmap import FMap, LinearCertificate
from legendre.formats import (
    ROW_COLUMNS,
    comparisons_frame,
    decimal_digits,
    decimal_string,
    format_decimal,
    parse_integer_set,
    parse_rows,
    render_frame,
    render_mapping,
    rows_frame,
)


class TestParseRows:
    def test_ranges_and_values(self):
        assert parse_rows('1..3,10,3') == [1, 2, 3, 10]
        assert parse_rows(' 100 , 1000 ') == [100, 1000]

    @pytest.mark.parametrize('text', ['5..2', '', ',', '-1', 'a', '1..'])
    def test_rejected(self, text):
        with pytest.raises(ParseError):
            parse_rows(text)


class TestParseIntegerSet:
    def test_primes(self):
        assert parse_integer_set('primes').label == 'primes'
        limited = parse_integer_set('Primes(50)')
        assert limited.limit == 50
        assert limited.size == 15

    def test_explicit_list_drops_duplicates(self, caplog):
        with caplog.at_level(logging.WARNING, logger='legendre.formats'):
            S = parse_integer_set('0, 1, 2, 2')
        assert S.elements == (0, 1, 2)
        assert 'Dropped 1 duplicate' in caplog.text

    def test_file(self, tmp_path):
        path = tmp_path / 'set.txt'
        path.write_text('# squares\n0\n1\n4  # two squared\n\n9\n', encoding='utf-8')
        assert parse_integer_set(f'@{path}').elements == (0, 1, 4, 9)

    @pytest.mark.parametrize('text', ['a,b', ',', '@/nonexistent/set.txt'])
    def test_rejected(self, text):
        with pytest.raises(ParseError):
            parse_integer_set(text)


class TestDecimals:
    @pytest.mark.parametrize('value, digits', [(0, 1), (9, 1), (99, 2), (100, 3), (-1000, 4),
                                               (10 ** 40 - 1, 40), (10 ** 40, 41)])
    def test_digit_count(self, value, digits):
        assert decimal_digits(value) == digits

    def test_digit_cap(self):
        assert decimal_string(12345, 5) == '12345'
        assert decimal_string(123456, 5) is None

    def test_thousands_separator(self):
        assert format_decimal('94417.8375') == '94,417.8375'
        assert format_decimal('-1234') == '-1,234'
        assert format_decimal('0.5') == '0.5'


class TestRendering:
    def test_csv_uses_crlf(self):
        frame = pd.DataFrame({'n': [1, 2], 'value': ['a', 'b,c']})
        assert render_frame(frame, 'csv') == 'n,value\r\n1,a\r\n2,"b,c"\r\n'

    def test_json_records(self):
        frame = pd.DataFrame({'n': [1], 'value': ['24']})
        assert json.loads(render_frame(frame, 'json')) == [{'n': 1, 'value': '24'}]

    def test_unknown_format(self):
        with pytest.raises(ParseError):
            render_frame(pd.DataFrame(), 'xml')
        with pytest.raises(ParseError):
            render_mapping({}, 'xml')

    def test_mapping(self):
        data = {'f': 'x', 'value': 3, 'factors': [[2, 1]], 'missing': None}
        assert render_mapping(data, 'text') == 'f        x\nvalue    3\nfactors  [[2,1]]\nmissing  \n'
        assert render_mapping({'f': 'x'}, 'csv') == 'field,value\r\nf,x\r\n'
        assert json.loads(render_mapping(data, 'json')) == data

    def test_rows_frame(self):
        rows = table(FMap.shifted_linear(1, -1), LinearCertificate(1, Fraction(2)), [1, 2])
        frame = rows_frame(rows)
        assert list(frame.columns) == ROW_COLUMNS
        assert frame['lhs_lo'].tolist() == ['0.6931', '3.1780']

    def test_comparisons_frame(self):
        frame = comparisons_frame(reproduce_table(2, [1], cross_check=False))
        assert frame.loc[0, 'lhs_printed'] == '1.7917'
        assert bool(frame.loc[0, 'lhs_match'])
