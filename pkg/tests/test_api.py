import pytest
from fastapi.testclient import TestClient

from legendre import __version__
from legendre.api import app


@pytest.fixture(scope='module')
def client():
    return TestClient(app)


def test_root_and_health(client):
    assert client.get('/').json()['version'] == __version__
    response = client.get('/health')
    assert response.status_code == 200
    assert response.json()['status'] == 'healthy'


def test_status(client):
    body = client.get('/status').json()
    assert body['status'] == 'operational'
    assert body['problems'] == []
    assert 'precision' in body['config']


class TestFfact:
    def test_value_and_factorization(self, client):
        response = client.get('/ffact', params={'f': 'x-1', 'n': 4})
        assert response.status_code == 200
        body = response.json()
        assert body['value'] == '5760'
        assert body['factorization']['factors'] == [[2, 7], [3, 2], [5, 1]]
        assert body['log']['lo'].startswith('8.6586')

    def test_parse_error(self, client):
        response = client.get('/ffact', params={'f': 'x^3', 'n': 1})
        assert response.status_code == 400
        assert response.json() == {
            'error': 'ParseError',
            'detail': response.json()['detail'],
            'exit_code': 1,
        }

    def test_divergent_map(self, client):
        response = client.get('/ffact', params={'f': 'abs(sin(x))', 'n': 1})
        assert response.status_code == 422
        assert response.json()['error'] == 'DivergentFactorial'
        assert response.json()['exit_code'] == 2

    def test_negative_n_is_rejected(self, client):
        assert client.get('/ffact', params={'f': 'x', 'n': -1}).status_code == 422


class TestBhargava:
    def test_primes(self, client):
        body = client.get('/bhargava', params={'set': 'primes', 'n': 3}).json()
        assert body['value'] == '24'
        assert body['valuations'] == {'2': 3, '3': 1}
        assert 'orderings' not in body

    def test_orderings(self, client):
        body = client.get('/bhargava', params={'set': '0,1,2,3', 'n': 3, 'show_orderings': True}).json()
        assert body['value'] == '6'
        two = next(o for o in body['orderings'] if o['p'] == 2)
        assert two['step_valuations'] == [0, 0, 1, 1]


class TestConstant:
    def test_accelerated_beta(self, client):
        body = client.get('/constant/beta').json()
        assert body['mode'] == 'accelerated'
        assert body['value_lo'].startswith('1.067643')

    def test_beta_f(self, client):
        body = client.get('/constant/beta_f', params={
            'f': 'x', 'alpha': 1, 'M': '0', 'tol': 1e-9, 'mode': 'rigorous',
        }).json()
        assert body['value_hi'] == '0.000000000000'

    def test_unknown_constant(self, client):
        assert client.get('/constant/zeta').status_code == 422

    def test_beta_f_needs_certificate(self, client):
        assert client.get('/constant/beta_f', params={'f': 'x'}).status_code == 400

    def test_bad_mode(self, client):
        assert client.get('/constant/C', params={'mode': 'fast'}).status_code == 400


class TestTable:
    def test_printed_row(self, client):
        rows = client.get('/table/2', params={'rows': '1'}).json()
        assert rows[0]['lhs_printed'] == '1.7917'
        assert rows[0]['matches'] is True

    def test_unprinted_row(self, client):
        rows = client.get('/table/1', params={'rows': '20'}).json()
        assert rows[0]['n'] == 20
        assert 'matches' not in rows[0]

    def test_unknown_table(self, client):
        response = client.get('/table/3')
        assert response.status_code == 422
        assert response.json()['error'] == 'DomainError'
