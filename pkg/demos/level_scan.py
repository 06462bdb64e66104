"""Primes in progressions: how the error sum grows with the level.

For x up to 1e6 and Q = x^theta this prints the weighted maximal error
E_1(x, Q) = sum_{q <= Q} max_a |pi(x; a, q) - li(x)/phi(q)|, normalized
by x.  Below theta = 1/2 the normalized sum stays small; pushing theta
towards 1 makes it grow.  A smooth-moduli scan for the tuple (0, 2, 6)
counts the roots of P(n) = n(n+2)(n+6) modulo each squarefree q
that are coprime to q (only those classes can hold primes).
"""

from primegap import Tuple, build_prime_table
from primegap.equidist import level_scan, smooth_moduli_scan

THETAS = [0.2, 0.3, 0.4, 0.5, 0.6]


def main():
    table = build_prime_table(10**6 + 64)
    print("E_1(x, x^theta) / x")
    print(f"{'x':>9} " + " ".join(f"{t:>9}" for t in THETAS))
    for x in (10**4, 10**5, 10**6):
        reps = level_scan(x, THETAS, table, threads=4)
        print(f"{x:>9} " + " ".join(f"{r.meta['normalized']:>9.3g}" for r in reps))

    t = Tuple((0, 2, 6))
    rep = smooth_moduli_scan(10**5, 0.4, 0.3, t, table)
    print(f"\nsmooth moduli, x = 1e5, theta = 0.4, omega = 0.3: {len(rep.per_q)} moduli")
    for row in rep.per_q[:8]:
        print(f"  q = {row.q:4d}: roots {row.root_count:3d}, max error {row.max_error:.3f}")


if __name__ == "__main__":
    main()
