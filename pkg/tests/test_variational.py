import json
import math
from fractions import Fraction

import pytest
import sympy

from oracles import dirichlet_by_beta_recursion
from primegap.errors import DegenerateBasisError, DomainError, InvalidArgument
from primegap.variational import (
    MkCertificate,
    SimplexPolynomial,
    build_forms,
    certify_top_eigenvector,
    gpy_basis_ratio,
    gpy_ratio_closed_form,
    i_functional,
    independent_ldl,
    j_functional,
    logk_bound,
    mk_lower_bound,
    primes_count_threshold,
    rayleigh_quotient,
    simplex_monomial_integral,
    symmetric_basis,
    symmetric_forms,
    symmetric_to_polynomial,
    verify_certificate,
)

X, Y, W = sympy.symbols("x y w", nonnegative=True)


def sym_simplex2(expr):
    """Iterated symbolic integral over {x, y >= 0, x + y <= 1}."""
    return sympy.integrate(sympy.integrate(expr, (Y, 0, 1 - X)), (X, 0, 1))


def to_sympy2(F):
    out = 0
    for (a, b, s), c in F.terms.items():
        out += sympy.Rational(c.numerator, c.denominator) * X**a * Y**b * (1 - X - Y) ** s
    return out


def test_monomial_integral_examples():
    assert simplex_monomial_integral((0, 0, 0)) == Fraction(1, 6)
    assert simplex_monomial_integral((2,)) == Fraction(1, 3)
    assert simplex_monomial_integral((1, 1)) == Fraction(1, 24)
    with pytest.raises(InvalidArgument):
        simplex_monomial_integral((-1, 0))


def test_monomial_integral_against_beta_recursion():
    for exps in [(0,), (3,), (1, 2), (2, 0, 1), (1, 1, 1, 1), (4, 0, 2, 1, 0)]:
        assert simplex_monomial_integral(exps) == dirichlet_by_beta_recursion(list(exps))


def test_polynomial_integrals_against_sympy():
    F = SimplexPolynomial.linear([3, -2], 1) * SimplexPolynomial.monomial((1, 0), slack=2) + SimplexPolynomial.constant(2, 5)
    assert sympy.Rational(F.integrate()) == sym_simplex2(to_sympy2(F))
    g = F.integrate_out(0)  # a polynomial in y on [0, 1]
    expr = sympy.integrate(to_sympy2(F), (X, 0, 1 - Y))
    for yv in (Fraction(0), Fraction(1, 3), Fraction(3, 4)):
        assert sympy.Rational(g(yv)) == expr.subs(Y, sympy.Rational(yv.numerator, yv.denominator))


def test_evaluation_and_arithmetic():
    F = SimplexPolynomial.linear([-1, -1], 1)
    assert F(Fraction(1, 2), Fraction(1, 2)) == 0
    assert F(Fraction(1, 4), 0) == Fraction(3, 4)
    assert F(1, 1) == 0  # outside the simplex
    G = SimplexPolynomial.gpy(2, 1)
    # same function, different term representations
    assert all(F(Fraction(a, 7), Fraction(b, 7)) == G(Fraction(a, 7), Fraction(b, 7)) for a in range(8) for b in range(8 - a))
    assert F.integrate() == G.integrate()
    assert (F * 2).integrate() == 2 * F.integrate()
    assert SimplexPolynomial.symmetric(3, 1, 2).degree == 5


def test_build_forms_examples():
    fp = build_forms(1, [SimplexPolynomial.constant(1)])
    assert fp.A == [[1]] and fp.B == [[1]]
    fp = build_forms(2, [SimplexPolynomial.linear([-1, -1], 1)])
    assert fp.B == [[Fraction(1, 12)]]
    assert fp.ratio() == Fraction(6, 5)
    with pytest.raises(InvalidArgument):
        build_forms(3, [SimplexPolynomial.constant(2)])


def test_forms_against_sympy_for_k2():
    basis = [SimplexPolynomial.constant(2), SimplexPolynomial.linear([1, 0]), SimplexPolynomial.monomial((0, 1), slack=1)]
    fp = build_forms(2, basis)
    exprs = [to_sympy2(f) for f in basis]
    for i in range(3):
        for j in range(3):
            assert sympy.Rational(fp.B[i][j]) == sym_simplex2(exprs[i] * exprs[j])
            # J1: integrate out x, then integrate the product over y in [0,1]; J2 likewise in y
            gi1 = sympy.integrate(exprs[i], (X, 0, 1 - Y))
            gj1 = sympy.integrate(exprs[j], (X, 0, 1 - Y))
            gi2 = sympy.integrate(exprs[i], (Y, 0, 1 - X))
            gj2 = sympy.integrate(exprs[j], (Y, 0, 1 - X))
            a = sympy.integrate(gi1 * gj1, (Y, 0, 1)) + sympy.integrate(gi2 * gj2, (X, 0, 1))
            assert sympy.Rational(fp.A[i][j]) == sympy.simplify(a)


def test_gpy_closed_form():
    assert gpy_ratio_closed_form(1, 0) == 1
    assert gpy_ratio_closed_form(2, 1) == Fraction(6, 5)
    for k in range(1, 7):
        for ell in range(k):
            assert gpy_basis_ratio(k, ell) == gpy_ratio_closed_form(k, ell)
            # equivalent form of the multiplier shape
            assert Fraction(1, 2) * gpy_ratio_closed_form(k, ell) == Fraction(k, k + 2 * ell + 1) * Fraction(2 * ell + 1, ell + 1)
    with pytest.raises(InvalidArgument):
        gpy_ratio_closed_form(2, 2)


def test_symmetric_forms_match_generic_assembly():
    basis = symmetric_basis(3)
    for k in (2, 3, 4):
        polys = [SimplexPolynomial.symmetric(k, a, b) for a, b in basis]
        direct = build_forms(k, polys)
        sym = build_forms(k, polys, symmetric=True)
        fast = symmetric_forms(k, basis)
        assert direct.A == sym.A == fast.A
        assert direct.B == sym.B == fast.B


def test_j_forms_identical_for_each_variable():
    F = SimplexPolynomial.symmetric(3, 2, 1)
    assert j_functional(F, 0) == j_functional(F, 1) == j_functional(F, 2)
    assert i_functional(F) == (F * F).integrate()


def test_scale_invariance():
    fp = symmetric_forms(4, symmetric_basis(3))
    c = [Fraction(i + 1, 3) for i in range(len(fp.B))]
    q = rayleigh_quotient(fp.A, fp.B, c)
    for s in (Fraction(-2), Fraction(7, 3), Fraction(1, 1000)):
        assert rayleigh_quotient(fp.A, fp.B, [s * x for x in c]) == q


def test_ldl_prunes_dependent_columns():
    kept, L, D = independent_ldl(symmetric_forms(1, symmetric_basis(4)).B)
    # with k = 1, P2 = (1 - P1)-polynomial squared, so only the a-powers survive
    assert len(kept) == 5
    with pytest.raises(DegenerateBasisError):
        certify_top_eigenvector([[Fraction(0)]], [[Fraction(0)]])


def test_m1_is_one():
    cert = mk_lower_bound(1, 4)
    assert cert.bound <= 1
    assert abs(float(cert.bound) - 1) < 1e-9
    assert all(b == 0 for _, b in cert.basis)


def test_degree_monotone():
    for k in (2, 5):
        bounds = [mk_lower_bound(k, d).bound for d in range(1, 6)]
        assert all(b1 <= b2 for b1, b2 in zip(bounds, bounds[1:]))
        assert bounds[0] >= gpy_ratio_closed_form(k, 0)


def test_certificate_soundness_and_serialization():
    cert = mk_lower_bound(6, 4)
    assert verify_certificate(cert) == cert.bound
    assert float(cert.bound) <= cert.float_eigen_estimate + 1e-6
    d = json.loads(json.dumps(cert.to_dict()))
    back = MkCertificate.from_dict(d)
    assert back.bound == cert.bound and back.coefficients == cert.coefficients
    assert verify_certificate(back) == cert.bound
    # independent route: expand the symmetric combination and use the generic forms
    F = symmetric_to_polynomial(6, cert.basis, cert.coefficients)
    ratio = sum((j_functional(F, j) for j in range(6)), Fraction(0)) / i_functional(F)
    assert ratio == cert.bound
    tampered = MkCertificate(cert.k, cert.basis, cert.coefficients, cert.bound + Fraction(1, 10**9), 0.0)
    with pytest.raises(DegenerateBasisError):
        verify_certificate(tampered)


def test_threshold_examples():
    assert primes_count_threshold(Fraction(1, 2), Fraction(4002, 1000)) == (2, 1)
    assert primes_count_threshold(1, Fraction(4002, 1000)) == (3, 2)
    assert primes_count_threshold(Fraction(1, 2), 2) == (1, 0)
    with pytest.raises(InvalidArgument):
        primes_count_threshold(0, 4)


def test_logk_bound():
    assert logk_bound(105) == pytest.approx(math.log(105) - 2 * math.log(math.log(105)) - 2)
    assert logk_bound(105) == pytest.approx(-0.421, abs=1e-3)
    assert logk_bound(3) < 0
    vals = [logk_bound(k) for k in range(16, 400)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    with pytest.raises(DomainError):
        logk_bound(2)
