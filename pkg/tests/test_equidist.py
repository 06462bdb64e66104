import math

import numpy as np
import pytest

from oracles import naive_sieve, roots_by_scan
from primegap.arith import euler_phi, logarithmic_integral, tau_l
from primegap.equidist import (
    SMOOTH_CAVEAT,
    cauchy_ratio,
    coprime_residues,
    error_sum_El,
    level_scan,
    partition_identity,
    pi_in_progression,
    progression_counts,
    root_weighted_scan,
    roots_of_P_mod_q,
    smooth_moduli_scan,
    smooth_squarefree_moduli,
)
from primegap.errors import InvalidArgument, TableRangeError, UnsupportedError
from primegap.tuples import Tuple

PRIMES_1E5 = naive_sieve(10**5)


def test_pi_in_progression_examples(table):
    assert pi_in_progression(100, 1, 4, table) == 11
    assert pi_in_progression(100, 0, 2, table) == 1
    assert pi_in_progression(10**5, 0, 1, table) == table.pi(10**5)
    with pytest.raises(InvalidArgument):
        pi_in_progression(100, 4, 4, table)
    with pytest.raises(TableRangeError):
        pi_in_progression(table.limit + 1, 0, 1, table)


def test_progression_counts_match_enumeration(table):
    for q in (3, 10, 17, 30):
        counts = progression_counts(10**5, q, table)
        for a in range(q):
            assert counts[a] == sum(1 for p in PRIMES_1E5 if p % q == a)


def test_partition_identity(table):
    for q in range(1, 101):
        lhs, rhs = partition_identity(10**6, q, table)
        assert lhs == rhs


def test_error_sum_single_modulus(table):
    x = 10**5
    rep = error_sum_El(x, 1, 1, table)
    assert rep.E_total == pytest.approx(abs(len(PRIMES_1E5) - logarithmic_integral(x)), rel=1e-12)
    assert [r.q for r in rep.per_q] == [1]


def test_error_sum_against_direct_computation(table):
    x, Q = 10**5, 30
    li = logarithmic_integral(x)
    expect = 0.0
    for q in range(1, Q + 1):
        errs = [abs(sum(1 for p in PRIMES_1E5 if p % q == a) - li / euler_phi(q)) for a in range(q) if math.gcd(a, q) == 1]
        expect += tau_l(2, q) * max(errs)
    rep = error_sum_El(x, Q, 2, table)
    assert rep.E_total == pytest.approx(expect, rel=1e-12)
    assert rep.recompute_total() == rep.E_total


def test_witnesses_reproduce_maxima(table):
    x = 10**5
    rep = error_sum_El(x, 40, 1, table)
    li = logarithmic_integral(x)
    for r in rep.per_q:
        assert math.gcd(r.witness_a, r.q) == 1
        assert abs(pi_in_progression(x, r.witness_a, r.q, table) - li / euler_phi(r.q)) == r.max_error


def test_weighting_orders(table):
    e1 = error_sum_El(10**5, 50, 1, table)
    e3 = error_sum_El(10**5, 50, 3, table)
    assert e3.E_total >= e1.E_total
    assert e1.E_total == math.fsum(r.max_error for r in e1.per_q)
    assert [r.q for r in e1.per_q] == list(range(1, 51))


def test_threads_give_identical_report(table):
    a = error_sum_El(10**5, 60, 2, table, threads=1)
    b = error_sum_El(10**5, 60, 2, table, threads=4)
    assert a.E_total == b.E_total and a.per_q == b.per_q


def test_level_scan(table):
    reps = level_scan(10**5, [0.01, 0.3, 0.5], table)
    assert reps[0].Q == 1
    for rep, th in zip(reps, [0.01, 0.3, 0.5]):
        assert rep.Q == max(1, math.floor((10**5) ** th))
        if rep.Q > 1:
            assert rep.theta_equivalent == pytest.approx(th, abs=0.05)
        assert rep.meta["normalized"] == rep.E_total / 10**5
    with pytest.raises(InvalidArgument):
        level_scan(10**5, [1.2], table)


def test_roots_examples():
    assert roots_of_P_mod_q(Tuple((0, 2)), 15) == [0, 3, 10, 13] == roots_by_scan((0, 2), 15)
    assert roots_of_P_mod_q(Tuple((0, 2)), 1) == [0]
    t = Tuple((0, 2, 6, 8))
    assert len(roots_of_P_mod_q(t, 11)) == 4
    assert len(roots_of_P_mod_q(t, 3)) == 2  # 0, 2, 6, 8 hit two classes mod 3
    with pytest.raises(UnsupportedError):
        roots_of_P_mod_q(t, 12)


def test_roots_match_scan_and_multiply():
    rng = np.random.default_rng(2)
    sq = [q for q in range(1, 400) if all(q % (p * p) for p in range(2, 20))]
    for _ in range(100):
        h = tuple(sorted(set(int(v) for v in rng.integers(0, 40, size=int(rng.integers(1, 6))))))
        t = Tuple(h)
        q1, q2 = (int(v) for v in rng.choice(sq, size=2))
        if math.gcd(q1, q2) != 1 or q1 * q2 > 3000:
            continue
        assert roots_of_P_mod_q(t, q1) == roots_by_scan(h, q1)
        assert len(roots_of_P_mod_q(t, q1 * q2)) == len(roots_of_P_mod_q(t, q1)) * len(roots_of_P_mod_q(t, q2))


def test_smooth_scan(table):
    t = Tuple((0, 2))
    x = 10**5
    rep = smooth_moduli_scan(x, 0.3, 0.2, t, table)
    assert rep.meta["caveat"] == SMOOTH_CAVEAT
    bound = x**0.2
    for r in rep.per_q:
        assert r.root_count == sum(1 for a in roots_of_P_mod_q(t, r.q) if math.gcd(a, r.q) == 1)
    assert [r.q for r in rep.per_q] == smooth_squarefree_moduli(math.floor(x**0.3), bound)
    full = root_weighted_scan(x, math.floor(x**0.3), t, table)
    assert rep.E_total <= full.E_total
    assert rep.recompute_total() == rep.E_total
    tiny = smooth_moduli_scan(x, 0.3, 0.01, t, table)  # x^0.01 < 2: only q = 1
    assert [r.q for r in tiny.per_q] == [1]
    assert tiny.E_total == pytest.approx(abs(table.pi(x) - logarithmic_integral(x)))


def test_cauchy_ratio_is_finite(table):
    r = cauchy_ratio(10**5, 30, table)
    assert math.isfinite(r["ratio"]) and r["ratio"] > 0
