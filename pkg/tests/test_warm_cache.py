from legendre.config import config
from legendre.primes import PrimeCache
from warm_cache import warm_cache


def test_writes_then_reuses_cache(tmp_path, capsys):
    config.cache_dir = tmp_path
    assert warm_cache(1000) == 168
    assert PrimeCache(tmp_path).cached_limits() == [1000]
    assert 'Cached 168 primes <= 1000' in capsys.readouterr().out

    assert warm_cache(500) == 95
    assert 'already covers 500' in capsys.readouterr().out
