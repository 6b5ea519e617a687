"""
Sieve the primes once and write them to the prime cache.
Run this script before long constant evaluations or table runs.

    python warm_cache.py [LIMIT]
"""
import sys

from legendre.config import config
from legendre.logging_config import logger, setup_logging
from legendre.primes import PrimeCache, primes_up_to, verify_table

DEFAULT_LIMIT = 10_000_000


def warm_cache(limit: int) -> int:
    """Sieve up to limit and persist the table; returns the prime count."""
    cache = PrimeCache(config.cache_dir)
    existing = cache.find_covering(limit)
    if existing is not None:
        logger.info(f"Cache already covers {limit}: {len(existing)} primes <= {existing.limit}")
        print(f"Cache already covers {limit} ({existing.limit} in {config.cache_dir})")
        return len(existing.upto(limit))

    table = primes_up_to(limit, use_cache=False)
    if limit <= 100_000 and not verify_table(table):
        raise RuntimeError(f"prime table up to {limit} failed verification")
    path = cache.save(table)
    if path is None:
        raise RuntimeError(f"could not write the prime cache in {config.cache_dir}")
    print(f"Cached {len(table)} primes <= {limit}")
    print(f"   File: {path}")
    return len(table)


if __name__ == "__main__":
    setup_logging()
    limit = int(sys.argv[1]) if len(sys.argv) > 1 else DEFAULT_LIMIT
    try:
        warm_cache(limit)
    except Exception as e:
        print(f"Error: {str(e)}")
        sys.exit(1)
