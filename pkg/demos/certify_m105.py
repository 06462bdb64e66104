"""Certified lower bound for M_105 and the bounded-gap chain.

Builds the symmetric (1 - P1)^a P2^b basis of degree 11, rounds the top
generalized eigenvector to small rationals and evaluates the Rayleigh
quotient exactly.  Since M_105 > 4, level theta = 1/2 gives at least two
primes among n + h_i for infinitely many n, for every admissible
105-tuple; the narrowest tuples at hand then bound the gap.
"""

import time
from fractions import Fraction
from pathlib import Path

from primegap import Tuple, build_prime_table, is_admissible, mk_lower_bound, primes_count_threshold
from primegap.tuples import greedy_tuple, shifted_primes_tuple
from primegap.variational import logk_bound, verify_certificate

DATA = Path(__file__).resolve().parents[1] / "data"


def main():
    t0 = time.perf_counter()
    cert = mk_lower_bound(105, 11)
    print(f"M_105 >= {float(cert.bound):.9f}  ({len(cert.basis)} basis terms, {time.perf_counter() - t0:.1f}s)")
    t0 = time.perf_counter()
    assert verify_certificate(cert) == cert.bound
    print(f"re-verified from the stored rationals in {time.perf_counter() - t0:.2f}s")

    for k in (5, 10, 50, 105):
        b = mk_lower_bound(k, 5).bound
        print(f"  k = {k:3d}, degree 5: M_k >= {float(b):.5f}   (log k - 2 log log k - 2 = {logk_bound(k):.5f})")

    m, rho = primes_count_threshold(Fraction(1, 2), cert.bound)
    print(f"\ntheta = 1/2: at least {m} primes in n + H infinitely often (rho = {rho})")

    table = build_prime_table(10**4)
    candidates = {
        "first 105 primes > 105, shifted": shifted_primes_tuple(105, table),
        "greedy sieve, window 1500": greedy_tuple(105, 1500, table),
        "local search (data file)": Tuple.load(DATA / "admissible_105_600.json"),
    }
    for name, t in candidates.items():
        assert is_admissible(t, table)
        print(f"  {name:34s} diameter {t.diameter}")
    best = min(t.diameter for t in candidates.values())
    print(f"liminf (p_(n+1) - p_n) <= {best}")


if __name__ == "__main__":
    main()
