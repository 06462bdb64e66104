"""Exact quadratic forms over the simplex and certified lower bounds for M_k.

For ``F`` supported on the simplex ``{xi_i >= 0, sum xi_i <= 1}`` in ``k``
dimensions, the two functionals are

    I(F)      = integral of F^2
    J^(j)(F)  = integral over the other k-1 variables of
                (integral of F d xi_j)^2

and ``M_k`` is the supremum of ``sum_j J^(j)(F) / I(F)``.  Every integral
here is a Dirichlet integral

    int xi_1^a_1 ... xi_k^a_k (1 - sum xi)^s  =  a_1! ... a_k! s! / (k + |a| + s)!

so all forms are exact rationals.  Floating point is used only to find a
good coefficient vector; the bound itself is the exactly evaluated
Rayleigh quotient of a rational vector.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateBasisError, DomainError, InvalidArgument

Matrix = list[list[Fraction]]

DENOMINATOR_CAP = 10**6


def simplex_monomial_integral(exponents: Sequence[int], k: int | None = None, slack: int = 0) -> Fraction:
    """Integral of ``prod xi_i^a_i * (1 - sum xi)^slack`` over the k-simplex."""
    exponents = tuple(exponents)
    if k is None:
        k = len(exponents)
    if len(exponents) != k:
        raise InvalidArgument(f"expected {k} exponents, got {len(exponents)}")
    if any(a < 0 for a in exponents) or slack < 0:
        raise InvalidArgument(f"negative exponent in {exponents}, slack {slack}")
    num = math.factorial(slack)
    for a in exponents:
        num *= math.factorial(a)
    return Fraction(num, math.factorial(k + sum(exponents) + slack))


class SimplexPolynomial:
    """Polynomial on the k-simplex with exact rational coefficients.

    ``terms`` maps an exponent vector of length ``k + 1`` to a coefficient.
    The first ``k`` entries are the powers of ``xi_1 .. xi_k``; the last is
    the power of the slack ``1 - xi_1 - ... - xi_k``.  Keeping the slack as
    its own factor means ``(1 - sum xi)^l`` is a single term, and that
    integrating out a variable never requires binomial re-expansion.
    """

    __slots__ = ("k", "terms")

    def __init__(self, k: int, terms: dict | None = None):
        self.k = int(k)
        clean: dict[tuple[int, ...], Fraction] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) == self.k:
                exps = exps + (0,)
            if len(exps) != self.k + 1:
                raise InvalidArgument(f"exponent vector {exps} does not fit k = {self.k}")
            if any(e < 0 for e in exps):
                raise InvalidArgument(f"negative exponent in {exps}")
            c = Fraction(c)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
        self.terms = {e: c for e, c in clean.items() if c}

    # constructors
    @classmethod
    def constant(cls, k: int, c=1) -> "SimplexPolynomial":
        return cls(k, {(0,) * (k + 1): c})

    @classmethod
    def monomial(cls, exponents: Sequence[int], c=1, slack: int = 0) -> "SimplexPolynomial":
        return cls(len(exponents), {tuple(exponents) + (slack,): c})

    @classmethod
    def gpy(cls, k: int, ell: int) -> "SimplexPolynomial":
        """``(1 - sum xi)^ell``."""
        return cls(k, {(0,) * k + (ell,): 1})

    @classmethod
    def linear(cls, coeffs: Sequence, const=0) -> "SimplexPolynomial":
        k = len(coeffs)
        terms = {(0,) * (k + 1): const}
        for i, c in enumerate(coeffs):
            e = [0] * (k + 1)
            e[i] = 1
            terms[tuple(e)] = c
        return cls(k, terms)

    @classmethod
    def symmetric(cls, k: int, a: int, b: int) -> "SimplexPolynomial":
        """``(1 - P1)^a * P2^b`` with ``P2 = sum xi_i^2``, fully expanded."""
        out = cls(k, {(0,) * k + (a,): 1})
        p2 = cls(k, {tuple(2 if i == j else 0 for i in range(k)) + (0,): 1 for j in range(k)})
        for _ in range(b):
            out = out * p2
        return out

    # arithmetic
    def __add__(self, other: "SimplexPolynomial") -> "SimplexPolynomial":
        self._same_k(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return SimplexPolynomial(self.k, terms)

    def __neg__(self) -> "SimplexPolynomial":
        return SimplexPolynomial(self.k, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "SimplexPolynomial") -> "SimplexPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "SimplexPolynomial":
        if not isinstance(other, SimplexPolynomial):
            return SimplexPolynomial(self.k, {e: c * Fraction(other) for e, c in self.terms.items()})
        self._same_k(other)
        terms: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return SimplexPolynomial(self.k, terms)

    __rmul__ = __mul__

    def _same_k(self, other):
        if other.k != self.k:
            raise InvalidArgument(f"dimension mismatch: {self.k} vs {other.k}")

    def __repr__(self):
        return f"SimplexPolynomial(k={self.k}, terms={self.terms!r})"

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __call__(self, *point) -> Fraction:
        return self.evaluate(point)

    def evaluate(self, point: Sequence) -> Fraction:
        """Exact value at a rational point; zero outside the simplex."""
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = point[0]
        if len(point) != self.k:
            raise InvalidArgument(f"point has {len(point)} coordinates, expected {self.k}")
        xs = [Fraction(x) for x in point]
        s = 1 - sum(xs, Fraction(0))
        if s < 0 or any(x < 0 for x in xs):
            return Fraction(0)
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c * s ** e[-1]
            for x, a in zip(xs, e[:-1]):
                if a:
                    v *= x**a
            total += v
        return total

    def integrate(self) -> Fraction:
        """Exact integral over the k-simplex."""
        return sum(
            (c * simplex_monomial_integral(e[:-1], self.k, e[-1]) for e, c in self.terms.items()),
            Fraction(0),
        )

    def integrate_out(self, j: int) -> "SimplexPolynomial":
        """Integrate over ``xi_j`` from 0 to the simplex boundary.

        The result lives on the (k-1)-simplex of the remaining variables:
        ``int_0^s x^a (s - x)^m dx = a! m! / (a + m + 1)! * s^(a + m + 1)``
        with ``s`` the slack of the remaining variables.
        """
        if not 0 <= j < self.k:
            raise InvalidArgument(f"variable index {j} out of range for k = {self.k}")
        terms: dict[tuple[int, ...], Fraction] = {}
        for e, c in self.terms.items():
            a, m = e[j], e[-1]
            coeff = c * Fraction(math.factorial(a) * math.factorial(m), math.factorial(a + m + 1))
            new = e[:j] + e[j + 1 : -1] + (a + m + 1,)
            terms[new] = terms.get(new, Fraction(0)) + coeff
        return SimplexPolynomial(self.k - 1, terms)


def i_functional(F: SimplexPolynomial) -> Fraction:
    return (F * F).integrate()


def j_functional(F: SimplexPolynomial, j: int) -> Fraction:
    g = F.integrate_out(j)
    return (g * g).integrate()


@dataclass
class FormPair:
    """Exact Gram matrices of a basis: ``A`` for sum_j J^(j), ``B`` for I."""

    basis: list
    A: Matrix
    B: Matrix

    def ratio(self) -> Fraction:
        """``A/B`` for a single-function basis."""
        if len(self.basis) != 1:
            raise InvalidArgument("ratio() is defined for a one-element basis")
        return self.A[0][0] / self.B[0][0]


def build_forms(k: int, basis: Sequence[SimplexPolynomial], symmetric: bool = False) -> FormPair:
    """Exact ``A`` (sum of J forms) and ``B`` (I form) on ``basis``.

    With ``symmetric=True`` the basis is assumed invariant under permuting
    variables and ``A`` is assembled as ``k`` times the ``j = 1`` form.
    """
    for f in basis:
        if f.k != k:
            raise InvalidArgument(f"basis element of dimension {f.k} in a k = {k} build")
    n = len(basis)
    B = [[Fraction(0)] * n for _ in range(n)]
    A = [[Fraction(0)] * n for _ in range(n)]
    js = [0] if symmetric else range(k)
    inner = {j: [f.integrate_out(j) for f in basis] for j in js}
    for i in range(n):
        for m in range(i, n):
            B[i][m] = B[m][i] = (basis[i] * basis[m]).integrate()
            a = sum(((inner[j][i] * inner[j][m]).integrate() for j in js), Fraction(0))
            if symmetric:
                a *= k
            A[i][m] = A[m][i] = a
    return FormPair(list(basis), A, B)


def gpy_ratio_closed_form(k: int, ell: int) -> Fraction:
    """``sum_j J / I`` for ``F = (1 - sum xi)^ell``: 2k(2l+1) / ((l+1)(k+2l+1))."""
    if not 0 <= ell < k:
        raise InvalidArgument(f"need 0 <= ell < k, got ell={ell}, k={k}")
    return Fraction(2 * k * (2 * ell + 1), (ell + 1) * (k + 2 * ell + 1))


# --- symmetric (1 - P1)^a P2^b bases ------------------------------------------


def _partitions(n: int, cap: int | None = None):
    cap = n if cap is None else cap
    if n == 0:
        yield ()
        return
    for p in range(min(n, cap), 0, -1):
        for rest in _partitions(n - p, p):
            yield (p,) + rest


@lru_cache(maxsize=None)
def _p2_moment(k: int, b: int) -> int:
    """Sum over monomials of P2^b of multinomial * prod (2 beta_i)!."""
    if b == 0:
        return 1
    total = 0
    for lam in _partitions(b):
        r = len(lam)
        if r > k:
            continue
        placements = math.perm(k, r)
        for m in Counter(lam).values():
            placements //= math.factorial(m)
        t = math.factorial(b)
        for x in lam:
            t = t * math.factorial(2 * x) // math.factorial(x)
        total += placements * t
    return total


def symmetric_integral(k: int, a: int, b: int) -> Fraction:
    """Integral of ``(1 - P1)^a P2^b`` over the k-simplex."""
    return Fraction(math.factorial(a) * _p2_moment(k, b), math.factorial(k + 2 * b + a))


def _symmetric_inner(a: int, b: int) -> dict[tuple[int, int], Fraction]:
    # integral over xi_1 of (1-P1)^a P2^b, as (1-P1')^x P2'^y terms
    return {
        (a + 2 * j + 1, b - j): Fraction(
            math.comb(b, j) * math.factorial(a) * math.factorial(2 * j), math.factorial(a + 2 * j + 1)
        )
        for j in range(b + 1)
    }


def symmetric_basis(degree: int) -> list[tuple[int, int]]:
    """Exponent pairs ``(a, b)`` with ``a + 2b <= degree``."""
    if degree < 0:
        raise InvalidArgument("degree cap must be >= 0")
    return [(a, b) for b in range(degree // 2 + 1) for a in range(degree - 2 * b + 1)]


def symmetric_forms(k: int, basis: Sequence[tuple[int, int]]) -> FormPair:
    """Forms for ``(1 - P1)^a P2^b`` without expanding in k variables."""
    basis = [tuple(t) for t in basis]
    n = len(basis)
    inner = [_symmetric_inner(a, b) for a, b in basis]
    B = [[Fraction(0)] * n for _ in range(n)]
    A = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for m in range(i, n):
            (a1, b1), (a2, b2) = basis[i], basis[m]
            B[i][m] = B[m][i] = symmetric_integral(k, a1 + a2, b1 + b2)
            acc = Fraction(0)
            for (x1, y1), c1 in inner[i].items():
                for (x2, y2), c2 in inner[m].items():
                    acc += c1 * c2 * symmetric_integral(k - 1, x1 + x2, y1 + y2)
            A[i][m] = A[m][i] = k * acc
    return FormPair(basis, A, B)


# --- exact linear algebra ------------------------------------------------------


def quadratic_form(M: Matrix, c: Sequence[Fraction]) -> Fraction:
    n = len(c)
    return sum((c[i] * M[i][j] * c[j] for i in range(n) for j in range(n) if c[i] and c[j]), Fraction(0))


def rayleigh_quotient(A: Matrix, B: Matrix, c: Sequence) -> Fraction:
    c = [Fraction(x) for x in c]
    den = quadratic_form(B, c)
    if den == 0:
        raise DegenerateBasisError("c^T B c vanishes")
    return quadratic_form(A, c) / den


def independent_ldl(B: Matrix) -> tuple[list[int], Matrix, list[Fraction]]:
    """Exact LDL^T of ``B`` restricted to a maximal independent index set.

    Indices are scanned in order; an index is dropped when its Schur
    complement pivot is zero (``B`` is a Gram matrix, hence PSD).
    Returns ``(kept, L, D)`` for the kept principal submatrix.
    """
    kept: list[int] = []
    L: Matrix = []
    D: list[Fraction] = []
    for i in range(len(B)):
        row = []
        for jj, j in enumerate(kept):
            s = B[i][j] - sum((row[m] * L[jj][m] * D[m] for m in range(jj)), Fraction(0))
            row.append(s / D[jj])
        piv = B[i][i] - sum((row[m] ** 2 * D[m] for m in range(len(kept))), Fraction(0))
        if piv < 0:
            raise DegenerateBasisError("B is not positive semidefinite")
        if piv == 0:
            continue
        kept.append(i)
        L.append(row + [Fraction(1)])
        D.append(piv)
    n = len(kept)
    Lsq = [[L[i][j] if j < len(L[i]) else Fraction(0) for j in range(n)] for i in range(n)]
    return kept, Lsq, D


def _lower_inverse(L: Matrix) -> Matrix:
    n = len(L)
    X = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        X[i][i] = Fraction(1)
        for j in range(i):
            X[i][j] = -sum((L[i][m] * X[m][j] for m in range(j, i)), Fraction(0))
    return X


def _inv_sqrt(q: Fraction, bits: int = 64) -> Fraction:
    # rational approximation of q^(-1/2) with about `bits` significant bits
    shift = max(0, bits - (q.denominator.bit_length() - q.numerator.bit_length()) // 2)
    return Fraction(math.isqrt((q.denominator << (2 * shift)) // q.numerator), 1 << shift)


def _frac_to_float(q: Fraction) -> float:
    return float(q)


@dataclass
class MkCertificate:
    k: int
    basis: list[tuple[int, int]]
    coefficients: list[Fraction]
    bound: Fraction
    float_eigen_estimate: float
    degree: int | None = None
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "degree": self.degree,
            "basis": [list(t) for t in self.basis],
            "basis_family": "(1-P1)^a * P2^b",
            "coefficients": [f"{c.numerator}/{c.denominator}" for c in self.coefficients],
            "bound": f"{self.bound.numerator}/{self.bound.denominator}",
            "bound_decimal": f"{float(self.bound):.12g}",
            "float_eigen_estimate": f"{self.float_eigen_estimate:.12g}",
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MkCertificate":
        return cls(
            k=int(d["k"]),
            basis=[tuple(t) for t in d["basis"]],
            coefficients=[Fraction(s) for s in d["coefficients"]],
            bound=Fraction(d["bound"]),
            float_eigen_estimate=float(d["float_eigen_estimate"]),
            degree=d.get("degree"),
        )


def certify_top_eigenvector(A: Matrix, B: Matrix, cap: int = DENOMINATOR_CAP):
    """Rational vector near the top generalized eigenvector of ``(A, B)``.

    The eigenproblem is solved in the B-orthonormal coordinates given by
    the exact LDL^T factorization, where it is well conditioned; the
    eigenvector is rounded there (continued fractions, denominators up to
    ``cap``) and mapped back exactly.  Returns ``(kept, c, bound, estimate)``.
    """
    kept, L, D = independent_ldl(B)
    if not kept:
        raise DegenerateBasisError("basis spans only the zero function")
    Ak = [[A[i][j] for j in kept] for i in kept]
    Li = _lower_inverse(L)
    n = len(kept)
    AL = [[sum((Li[i][m] * Ak[m][j] for m in range(i + 1)), Fraction(0)) for j in range(n)] for i in range(n)]
    Ahat = [[sum((AL[i][m] * Li[j][m] for m in range(j + 1)), Fraction(0)) for j in range(n)] for i in range(n)]
    S = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            v = Ahat[i][j]
            S[i, j] = math.copysign(math.sqrt(_frac_to_float(v * v / (D[i] * D[j]))), v) if v else 0.0
    S = (S + S.T) / 2
    w, V = np.linalg.eigh(S)
    z = V[:, -1]
    z = z / z[np.argmax(np.abs(z))]
    zr = [Fraction(float(x)).limit_denominator(cap) for x in z]
    y = [zr[i] * _inv_sqrt(D[i]) for i in range(n)]
    # back-substitute L^T c = y
    c = [Fraction(0)] * n
    for i in reversed(range(n)):
        c[i] = y[i] - sum((L[m][i] * c[m] for m in range(i + 1, n)), Fraction(0))
    Bk = [[B[i][j] for j in kept] for i in kept]
    bound = rayleigh_quotient(Ak, Bk, c)
    return kept, c, bound, float(w[-1])


def mk_lower_bound(k: int, basis_spec: int | Iterable[tuple[int, int]] = 11, cap: int = DENOMINATOR_CAP) -> MkCertificate:
    """Certified rational lower bound for ``M_k``.

    ``basis_spec`` is a degree cap (basis ``(1-P1)^a P2^b``, ``a + 2b <= cap``)
    or an explicit list of ``(a, b)`` pairs.  Dependent basis functions
    (for instance every ``P2`` power when ``k = 1``) are pruned first.
    """
    if k < 1:
        raise InvalidArgument("k must be >= 1")
    degree = None
    if isinstance(basis_spec, int):
        degree = basis_spec
        basis = symmetric_basis(basis_spec)
    else:
        basis = [tuple(t) for t in basis_spec]
    forms = symmetric_forms(k, basis)
    kept, c, bound, estimate = certify_top_eigenvector(forms.A, forms.B, cap)
    return MkCertificate(
        k=k,
        basis=[basis[i] for i in kept],
        coefficients=c,
        bound=bound,
        float_eigen_estimate=estimate,
        degree=degree,
    )


def verify_certificate(cert: MkCertificate) -> Fraction:
    """Recompute the certified bound from scratch; raises on mismatch."""
    forms = symmetric_forms(cert.k, cert.basis)
    q = rayleigh_quotient(forms.A, forms.B, cert.coefficients)
    if q != cert.bound:
        raise DegenerateBasisError(f"certificate bound {cert.bound} != recomputed {q}")
    return q


def symmetric_to_polynomial(k: int, basis: Sequence[tuple[int, int]], coeffs: Sequence) -> SimplexPolynomial:
    out = SimplexPolynomial(k)
    for (a, b), c in zip(basis, coeffs):
        out = out + SimplexPolynomial.symmetric(k, a, b) * Fraction(c)
    return out


# --- threshold arithmetic -------------------------------------------------------


def primes_count_threshold(theta, mk_bound) -> tuple[int, int]:
    """``m`` = least positive integer ``>= theta * M / 2`` and ``rho = m - 1``."""
    if not 0 < theta <= 1:
        raise InvalidArgument(f"theta must lie in (0, 1], got {theta}")
    if mk_bound <= 0:
        raise InvalidArgument("M_k bound must be positive")
    target = Fraction(theta) * Fraction(mk_bound) / 2
    m = max(1, math.ceil(target))
    return m, m - 1


def logk_bound(k: int) -> float:
    """``log k - 2 log log k - 2``, the large-k lower bound for M_k."""
    if k < 3:
        raise DomainError(f"log k - 2 log log k - 2 needs k >= 3, got {k}")
    return math.log(k) - 2 * math.log(math.log(k)) - 2


def gpy_basis_ratio(k: int, ell: int) -> Fraction:
    """Ratio computed by exact integration of the one-element GPY basis."""
    return build_forms(k, [SimplexPolynomial.gpy(k, ell)]).ratio()


__all__ = [
    "FormPair",
    "MkCertificate",
    "SimplexPolynomial",
    "build_forms",
    "certify_top_eigenvector",
    "gpy_basis_ratio",
    "gpy_ratio_closed_form",
    "i_functional",
    "j_functional",
    "logk_bound",
    "mk_lower_bound",
    "primes_count_threshold",
    "rayleigh_quotient",
    "simplex_monomial_integral",
    "symmetric_basis",
    "symmetric_forms",
    "symmetric_integral",
    "symmetric_to_polynomial",
    "verify_certificate",
]
