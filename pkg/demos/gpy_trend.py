"""Weighted prime counts for twin-type tuples at desk scale.

For the tuple (0, 2) and GPY weights with ell = 1 this prints T1 (the
weighted count of n) and T2 (the weighted count of primes among n, n+2)
for growing x, with D = x^(theta/2).  The asymptotic ratio T2/T1 is
2 * (2 ell + 1) / ((ell + 1)(k + 2 ell + 1)) * theta for k = 2.  At these
sizes the empirical ratio is visibly smaller: the level D is tiny and the
lower-order terms dominate, so this is a trend, not a check.
"""

from primegap import Tuple, build_prime_table
from primegap.sums import naive_detector_sum, sum_T2
from primegap.weights import WeightSpec

THETA = 0.48


def main():
    table = build_prime_table(10**6 + 64)
    print("naive detector sum  sum_{3<=n<=x} (pi-indicator(n) + pi-indicator(n+2) - 1)")
    for x in (10, 100, 1000):
        print(f"  x = {x:5d}: {naive_detector_sum(x, table)['value']}")

    twin = Tuple((0, 2))
    print(f"\nGPY weights, k = 2, ell = 1, theta = {THETA}")
    print(f"{'x':>9} {'D':>4} {'T1':>14} {'T2':>14} {'T2/T1':>8} {'limit':>8}")
    for x in (10**4, 10**5, 10**6):
        D = max(2, int(x ** (THETA / 2)))
        spec = WeightSpec("GPY", twin, D, ell=1)
        rep = sum_T2((1, x), spec, None, table, theta=THETA, parts=4, threads=4)
        print(
            f"{x:>9} {D:>4} {float(rep.T1):>14.6g} {float(rep.T2):>14.6g} "
            f"{rep.empirical_ratio:>8.4f} {rep.predicted_ratio:>8.4f}"
        )


if __name__ == "__main__":
    main()
