"""Independent reference implementations, written without the package.

Each oracle favours the most obvious algorithm over speed: a plain
byte-array sieve, trial division, gcd counting and brute-force divisor
scans.
"""

import math
from fractions import Fraction
from itertools import product


def naive_sieve(n):
    """Sorted list of primes < n."""
    if n < 3:
        return []
    flags = bytearray([1]) * n
    flags[0] = flags[1] = 0
    for p in range(2, math.isqrt(n - 1) + 1):
        if flags[p]:
            flags[p * p :: p] = bytes(len(range(p * p, n, p)))
    return [i for i in range(n) if flags[i]]


def trial_is_prime(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def trial_factor(n):
    out, d = {}, 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def phi_by_gcd(n):
    return sum(1 for a in range(1, n + 1) if math.gcd(a, n) == 1)


def mobius_by_factor(n):
    f = trial_factor(n)
    if any(e > 1 for e in f.values()):
        return 0
    return (-1) ** len(f)


def divisors_by_scan(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def tau_l_by_count(l, n):
    """Ordered l-tuples of positive integers with product n."""
    if l == 1:
        return 1
    return sum(tau_l_by_count(l - 1, n // d) for d in divisors_by_scan(n))


def admissible_by_scan(h):
    """Check every prime p <= len(h) + 1 by listing residues."""
    for p in naive_sieve(len(h) + 2):
        if len({x % p for x in h}) == p:
            return False
    return True


def maynard_T1_brute(start, stop, lambdas, c0, Z, h):
    """sum over n = c0 (Z) in [start, stop) of (sum_{d_j | n + h_j} lambda(d))^2."""
    total = Fraction(0)
    for n in range(start, stop):
        if n % Z != c0:
            continue
        s = sum((v for d, v in lambdas.items() if all((n + hj) % dj == 0 for dj, hj in zip(d, h))), Fraction(0))
        total += s * s
    return total


def roots_by_scan(h, q):
    return [a for a in range(q) if math.prod(a + x for x in h) % q == 0]


def dirichlet_by_beta_recursion(exponents):
    """Dirichlet integral by the Beta-function recursion, one coordinate at a time.

    int over {x_i >= 0, sum x_i <= 1} of prod x_i^a_i equals
    prod a_i! / (k + sum a_i)!; here built up via nested Beta integrals.
    """
    k = len(exponents)
    # integrate coordinates last-to-first: int_0^{r} x^a (r - x)^s dx = B(a+1, s+1) r^{a+s+1}
    s = 0
    coef = Fraction(1)
    for a in reversed(exponents):
        coef *= Fraction(math.factorial(a) * math.factorial(s), math.factorial(a + s + 1))
        s = a + s + 1
    # remaining: int_0^1 ... already reduced; the last step integrates r from 0 to 1 implicitly
    return coef
