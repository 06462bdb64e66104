"""Sieve machinery for small gaps between primes.

Prime tables and multiplicative functions (``arith``), admissible tuples
(``tuples``), sieve weights (``weights``), weighted sums and exact
expansion oracles (``sums``), primes in progressions (``equidist``), the
simplex variational problem with certified bounds (``variational``), and
the ``primegap`` command line (``cli``).
"""

from .arith import PrimeTable, build_prime_table, cached_prime_table, count_twins
from .errors import PrimeGapError
from .tuples import Tuple, build_presift, is_admissible
from .variational import MkCertificate, SimplexPolynomial, mk_lower_bound, primes_count_threshold
from .weights import LambdaTable, WeightSpec

__version__ = "0.1.0"

__all__ = [
    "PrimeTable",
    "build_prime_table",
    "cached_prime_table",
    "count_twins",
    "PrimeGapError",
    "Tuple",
    "build_presift",
    "is_admissible",
    "MkCertificate",
    "SimplexPolynomial",
    "mk_lower_bound",
    "primes_count_threshold",
    "LambdaTable",
    "WeightSpec",
]
