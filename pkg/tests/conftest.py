import random

import pytest

from legendre.config import config
from legendre.primes import prime_source


@pytest.fixture(scope='session', autouse=True)
def isolated_cache(tmp_path_factory):
    """Keep the prime cache of a test run away from the user's cache."""
    directory = tmp_path_factory.mktemp('prime-cache')
    config.cache_dir = directory
    prime_source().clear()
    yield directory


@pytest.fixture(autouse=True)
def restore_config():
    """Undo per-test changes to the shared settings (CLI flags mutate them)."""
    saved = dict(vars(config))
    yield
    vars(config).clear()
    vars(config).update(saved)


@pytest.fixture
def rng():
    return random.Random(12345)
