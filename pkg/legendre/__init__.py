"""
Generalized factorials from Legendre-type prime-power formulas, Bhargava
factorials from p-orderings, and the prime-sum constants that govern their
growth, with guaranteed enclosures.
"""
from .bhargava import IntegerSet, bhargava_factorial, factorial_S, p_ordering, v_n
from .chebyshev import corollary16_check, lemma14_residual, psi_f, theta_f
from .constants import beta_f, constant_beta, constant_C
from .errors import LegendreError
from .factorials import ExponentVector, divides, exponent, factorial, generalized_binomial, log_factorial
from .fmap import FMap, LinearCertificate, parse_fmap, verify_certificate
from .numeric import BoundedValue
from .primes import PrimeTable, primes_up_to, theta

__version__ = '1.0.0'

__all__ = [
    'BoundedValue',
    'ExponentVector',
    'FMap',
    'IntegerSet',
    'LegendreError',
    'LinearCertificate',
    'PrimeTable',
    'beta_f',
    'bhargava_factorial',
    'constant_C',
    'constant_beta',
    'corollary16_check',
    'divides',
    'exponent',
    'factorial',
    'factorial_S',
    'generalized_binomial',
    'lemma14_residual',
    'log_factorial',
    'p_ordering',
    'parse_fmap',
    'primes_up_to',
    'psi_f',
    'theta',
    'theta_f',
    'v_n',
    'verify_certificate',
]
