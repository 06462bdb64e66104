"""Randomized invariants driven by hypothesis."""

import math
from fractions import Fraction

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import admissible_by_scan, maynard_T1_brute, roots_by_scan
from primegap.arith import build_prime_table, euler_phi, is_squarefree, mobius, tau_l
from primegap.equidist import roots_of_P_mod_q
from primegap.sums import count_in_progression, crt_general, expansion_oracle_T1, s0_direct, s0_eta, sum_T1
from primegap.tuples import Tuple, build_presift, is_admissible
from primegap.variational import rayleigh_quotient, symmetric_basis, symmetric_forms
from primegap.weights import WeightSpec, eta_from_lambda, eta_from_values, lambda_from_eta, maynard_support

TABLE = build_prime_table(200_000)
TWIN = Tuple((0, 2))
PS = build_presift(TWIN, 3)
SUPPORT_50 = maynard_support(2, 50, 6)

shift_sets = st.sets(st.integers(0, 150), min_size=1, max_size=20).map(lambda s: Tuple(tuple(sorted(s))))


@given(shift_sets, st.integers(-1000, 1000))
@settings(max_examples=200, deadline=None)
def test_admissibility_translation_invariant(t, c):
    assert is_admissible(t, TABLE) == is_admissible(t.shifted(c), TABLE) == admissible_by_scan(t.h)


@given(shift_sets, st.data())
@settings(max_examples=100, deadline=None)
def test_sub_tuples_of_admissible_are_admissible(t, data):
    assume(is_admissible(t, TABLE))
    keep = data.draw(st.sets(st.sampled_from(t.h), min_size=1))
    assert is_admissible(Tuple(tuple(sorted(keep))), TABLE)


@given(st.integers(1, 5000), st.integers(1, 5000))
@settings(max_examples=300, deadline=None)
def test_multiplicativity(a, b):
    assume(math.gcd(a, b) == 1)
    assert mobius(a * b) == mobius(a) * mobius(b)
    assert euler_phi(a * b) == euler_phi(a) * euler_phi(b)
    assert tau_l(4, a * b) == tau_l(4, a) * tau_l(4, b)


@given(shift_sets, st.integers(1, 60), st.integers(1, 60))
@settings(max_examples=100, deadline=None)
def test_root_counts_multiply(t, q1, q2):
    assume(math.gcd(q1, q2) == 1 and is_squarefree(q1) and is_squarefree(q2))
    r1, r2 = roots_of_P_mod_q(t, q1), roots_of_P_mod_q(t, q2)
    assert r1 == roots_by_scan(t.h, q1)
    assert len(roots_of_P_mod_q(t, q1 * q2)) == len(r1) * len(r2)


@given(st.lists(st.tuples(st.integers(0, 40), st.integers(1, 40)), min_size=1, max_size=4), st.integers(0, 500), st.integers(0, 500))
@settings(max_examples=200, deadline=None)
def test_crt_counting_matches_enumeration(congruences, a, length):
    congruences = [(r % m, m) for r, m in congruences]
    sol = crt_general(congruences)
    brute = [n for n in range(a, a + length) if all(n % m == r for r, m in congruences)]
    if sol is None:
        assert all(any(n % m != r for r, m in congruences) for n in range(math.lcm(*(m for _, m in congruences))))
    else:
        assert count_in_progression(a, a + length, *sol) == len(brute)


etas = st.dictionaries(
    st.sampled_from(SUPPORT_50),
    st.fractions(min_value=-5, max_value=5, max_denominator=9),
    min_size=1,
    max_size=30,
)


@given(etas)
@settings(max_examples=60, deadline=None)
def test_round_trip_and_s0_identity(values):
    eta = eta_from_values(values, 50, 2, 6)
    lam = lambda_from_eta(eta)
    assert eta_from_lambda(lam).entries == eta.entries
    assert not lam.support_violations()
    assert s0_direct(lam) == s0_eta(eta, PS).full


@given(etas, st.integers(100, 3000))
@settings(max_examples=30, deadline=None)
def test_T1_equals_expansion_oracle(values, N):
    lam = lambda_from_eta(eta_from_values(values, 50, 2, 6))
    spec = WeightSpec("Maynard", TWIN, 50, presift=PS)
    t1 = sum_T1((N, N + 400), spec, lam, TABLE).T1
    assert t1 == expansion_oracle_T1((N, N + 400), lam, PS)
    assert t1 == maynard_T1_brute(N, N + 400, lam.entries, PS.c0, PS.Z, TWIN.h)


FORMS_5 = symmetric_forms(5, symmetric_basis(3))


@given(
    st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=50), min_size=len(FORMS_5.B), max_size=len(FORMS_5.B)),
    st.fractions(min_value=-100, max_value=100, max_denominator=100),
)
@settings(max_examples=60, deadline=None)
def test_rayleigh_scale_invariance(c, s):
    assume(any(c) and s != 0)
    q = rayleigh_quotient(FORMS_5.A, FORMS_5.B, c)
    assert rayleigh_quotient(FORMS_5.A, FORMS_5.B, [s * x for x in c]) == q
