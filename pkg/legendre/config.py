"""
Runtime configuration for the legendre toolkit.

Values come from the environment (a local .env file is honoured) and can be
overridden per run by CLI flags.
"""
import logging
import os
from pathlib import Path
from typing import Any, Dict, List

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() == 'true'


class Settings:
    """Computation, cache and service settings."""

    def __init__(self) -> None:
        # Prime cache
        self.cache_dir = Path(os.getenv('LEGENDRE_CACHE_DIR', str(Path.home() / '.cache' / 'legendre'))).expanduser()
        self.cache_enabled = _env_bool('LEGENDRE_CACHE_ENABLED', 'true')
        self.max_sieve_limit = int(os.getenv('LEGENDRE_MAX_SIEVE_LIMIT', 2_000_000_000))
        self.segment_size = int(os.getenv('LEGENDRE_SEGMENT_SIZE', 1 << 20))

        # Precision control (bits)
        self.precision = int(os.getenv('LEGENDRE_PRECISION', 64))
        self.precision_ceiling = int(os.getenv('LEGENDRE_PRECISION_CEILING', 4096))
        self.theta_tolerance = float(os.getenv('LEGENDRE_THETA_TOLERANCE', '1e-9'))

        # Constant evaluation
        self.constant_prime_limit = int(os.getenv('LEGENDRE_CONSTANT_PRIME_LIMIT', 50_000_000))
        self.block_size = int(os.getenv('LEGENDRE_BLOCK_SIZE', 50_000))
        self.threads = int(os.getenv('LEGENDRE_THREADS', 1))
        self.accelerated_base = int(os.getenv('LEGENDRE_ACCELERATED_BASE', 1 << 20))

        # Certificates and output
        self.certificate_bound = int(os.getenv('LEGENDRE_CERTIFICATE_BOUND', 100_000))
        self.digit_cap = int(os.getenv('LEGENDRE_DIGIT_CAP', 5000))

        # Logging and service
        self.log_level = os.getenv('LOG_LEVEL', 'WARNING')
        self.log_file = os.getenv('LEGENDRE_LOG_FILE', '')
        self.rate_limit = os.getenv('LEGENDRE_RATE_LIMIT', '30/minute')
        self.allowed_origins = os.getenv('LEGENDRE_ALLOWED_ORIGINS', 'http://localhost:3000').split(',')

    def validate_config(self) -> List[str]:
        """Validate settings and return a list of problems."""
        errors = []

        if self.precision < 32:
            errors.append("LEGENDRE_PRECISION must be at least 32 bits")

        if self.precision_ceiling < self.precision:
            errors.append("LEGENDRE_PRECISION_CEILING must not be below LEGENDRE_PRECISION")

        if self.threads < 1:
            errors.append("LEGENDRE_THREADS must be positive")

        if self.block_size < 1 or self.segment_size < 1:
            errors.append("LEGENDRE_BLOCK_SIZE and LEGENDRE_SEGMENT_SIZE must be positive")

        if self.constant_prime_limit > self.max_sieve_limit:
            errors.append("LEGENDRE_CONSTANT_PRIME_LIMIT exceeds LEGENDRE_MAX_SIEVE_LIMIT")

        if self.accelerated_base < 64:
            errors.append("LEGENDRE_ACCELERATED_BASE should be at least 64")

        if self.theta_tolerance <= 0:
            errors.append("LEGENDRE_THETA_TOLERANCE must be positive")

        return errors

    def get_config_summary(self) -> Dict[str, Any]:
        """Get configuration summary (safe for logging and the status endpoint)."""
        return {
            'cache_dir': str(self.cache_dir),
            'cache_enabled': self.cache_enabled,
            'precision': self.precision,
            'precision_ceiling': self.precision_ceiling,
            'constant_prime_limit': self.constant_prime_limit,
            'threads': self.threads,
            'digit_cap': self.digit_cap,
            'log_level': self.log_level,
        }


config = Settings()

config_errors = config.validate_config()
if config_errors:
    for error in config_errors:
        logger.warning(f"Configuration problem: {error}")
