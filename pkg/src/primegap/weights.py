"""Sieve weights: Selberg's quasi-optimal lambdas, the GPY tapered weight,
its smoothed variant, and the multidimensional weight built from a
function F on the simplex by Selberg's change of variables.

Scalar kinds index lambda by one integer ``d``; the multidimensional kind
indexes it by a k-tuple ``(d_1, ..., d_k)`` with ``d_j | n + h_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .arith import PrimeTable, euler_phi, factorize, gamma_u, mobius
from .errors import DomainError, InvalidArgument
from .tuples import Presift, Tuple
from .variational import SimplexPolynomial

KINDS = ("SelbergTwin", "GPY", "SmoothedMP", "Maynard")


@dataclass(frozen=True)
class WeightSpec:
    kind: str
    tuple: Tuple
    D: int
    ell: int = 0
    omega: float | None = None
    F: SimplexPolynomial | Callable | None = None
    presift: Presift | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown weight kind {self.kind!r}; expected one of {KINDS}")
        if self.D < 1:
            raise InvalidArgument(f"D must be >= 1, got {self.D}")
        k = self.tuple.k
        if self.kind in ("GPY", "SmoothedMP") and not 0 <= self.ell < k:
            raise InvalidArgument(f"need 0 <= ell < k, got ell={self.ell}, k={k}")
        if self.kind == "SmoothedMP" and not (self.omega is not None and 0 < self.omega < 1):
            raise InvalidArgument(f"omega must lie in (0, 1), got {self.omega}")
        if self.kind == "SelbergTwin" and self.tuple.h != (0, 2):
            raise InvalidArgument("SelbergTwin weights use the tuple (0, 2)")
        if self.kind == "Maynard":
            if self.presift is None:
                raise InvalidArgument("Maynard weights need a presift (Z, c0)")
            if self.F is None:
                object.__setattr__(self, "F", SimplexPolynomial.gpy(k, self.ell))

    @property
    def k(self) -> int:
        return self.tuple.k

    @property
    def exponent(self) -> int:
        """Power of ``log(D/d)/log D`` in the scalar weights."""
        return 2 if self.kind == "SelbergTwin" else self.k + self.ell


@dataclass
class LambdaTable:
    """Finitely supported lambda coefficients with exact rational values."""

    entries: dict
    D: int
    k: int = 0  # 0 for scalar kinds
    Z: int = 1

    def __getitem__(self, key) -> Fraction:
        return self.entries.get(key, Fraction(0))

    def __len__(self):
        return len(self.entries)

    @property
    def max_abs(self) -> Fraction:
        return max((abs(v) for v in self.entries.values()), default=Fraction(0))

    def support_violations(self) -> list:
        """Keys with nonzero value breaking product <= D, squarefree, or (., Z) = 1."""
        bad = []
        for key, v in self.entries.items():
            if not v:
                continue
            ds = key if isinstance(key, tuple) else (key,)
            prod = math.prod(ds)
            if prod > self.D or not factorize(prod).is_squarefree or math.gcd(prod, self.Z) > 1:
                bad.append(key)
        return bad

    def to_csv_rows(self) -> list[tuple[str, int, int]]:
        rows = []
        for key in sorted(self.entries):
            v = self.entries[key]
            name = " ".join(map(str, key)) if isinstance(key, tuple) else str(key)
            rows.append((name, v.numerator, v.denominator))
        return rows


@dataclass
class EtaTable:
    entries: dict
    D: int
    k: int
    Z: int = 1

    def __getitem__(self, key) -> Fraction:
        return self.entries.get(key, Fraction(0))

    @property
    def max_abs(self) -> Fraction:
        return max((abs(v) for v in self.entries.values()), default=Fraction(0))


# --- exact log ratios -------------------------------------------------------


def log_ratio(d: int, D: int) -> Fraction:
    """``log d / log D`` as a Fraction.

    Exact when the ratio is rational (``d^q == D^p``); otherwise the exact
    binary value of the double-precision quotient.
    """
    if d == 1:
        return Fraction(0)
    if D < 2:
        raise InvalidArgument(f"log ratio needs D >= 2, got {D}")
    r = math.log(d) / math.log(D)
    guess = Fraction(r).limit_denominator(64)
    if guess > 0 and d**guess.denominator == D**guess.numerator:
        return guess
    return Fraction(r)


def _taper(d: int, D: int, power: int) -> Fraction:
    return (1 - log_ratio(d, D)) ** power


def lambda_selberg_quasi(d: int, D: int) -> Fraction:
    """``mu(d) (log(D/d)/log D)^2`` for ``d < D``, else 0."""
    if D < 2:
        raise InvalidArgument(f"D must be >= 2, got {D}")
    if d < 1:
        raise InvalidArgument(f"d must be >= 1, got {d}")
    if d >= D:
        return Fraction(0)
    mu = mobius(d)
    return mu * _taper(d, D, 2) if mu else Fraction(0)


def lambda_gpy_taper(d: int, D: int, k: int, ell: int) -> Fraction:
    """``mu(d) (log(D/d)/log D)^(k+ell)`` for ``d < D``, else 0."""
    if not 0 <= ell < k:
        raise InvalidArgument(f"need 0 <= ell < k, got ell={ell}, k={k}")
    if D < 2:
        raise InvalidArgument(f"D must be >= 2, got {D}")
    if d >= D:
        return Fraction(0)
    mu = mobius(d)
    return mu * _taper(d, D, k + ell) if mu else Fraction(0)


def smooth_divisor_filter(d: int, D: int, omega: float, table: PrimeTable | None = None) -> bool:
    """True iff every prime factor of ``d`` is below ``D**omega``."""
    if not 0 < omega < 1:
        raise InvalidArgument(f"omega must lie in (0, 1), got {omega}")
    bound = D**omega
    return all(p < bound for p in factorize(d, table).primes)


def scalar_lambda(d: int, spec: WeightSpec, table: PrimeTable | None = None) -> Fraction:
    if spec.D < 2:
        return Fraction(int(d == 1))
    if spec.kind == "SelbergTwin":
        return lambda_selberg_quasi(d, spec.D)
    if spec.kind == "SmoothedMP" and not smooth_divisor_filter(d, spec.D, spec.omega, table):
        return Fraction(0)
    return lambda_gpy_taper(d, spec.D, spec.k, spec.ell)


def scalar_lambda_table(spec: WeightSpec, table: PrimeTable | None = None) -> LambdaTable:
    """All nonzero scalar lambdas, keyed by squarefree ``d < D``."""
    if spec.kind == "Maynard":
        raise InvalidArgument("use lambda_from_eta for the Maynard kind")
    entries = {}
    for d in range(1, max(spec.D, 2)):
        v = scalar_lambda(d, spec, table)
        if v:
            entries[d] = v
    return LambdaTable(entries, D=spec.D)


def _squarefree_divisors_below(primes: list[int], bound: int) -> Iterator[int]:
    # divisors d < bound of the product of distinct `primes`, by DFS with pruning
    primes = sorted(primes)

    def walk(i: int, d: int):
        yield d
        for j in range(i, len(primes)):
            nd = d * primes[j]
            if nd >= bound:
                break
            yield from walk(j + 1, nd)

    return walk(0, 1)


def _prime_set(values, table: PrimeTable | None) -> list[int]:
    ps: set[int] = set()
    for v in values:
        if v <= 0:
            raise DomainError(f"shifted value {v} is not positive")
        ps.update(factorize(v, table).primes)
    return sorted(ps)


def weight_selberg_twin(n: int, D: int, table: PrimeTable | None = None) -> float:
    """``(sum_{d | n(n+2), d < D} lambda(d))^2`` with the quasi-optimal lambdas."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    if D < 2:
        return 1.0
    primes = _prime_set((n, n + 2), table)
    s = math.fsum(float(lambda_selberg_quasi(d, D)) for d in _squarefree_divisors_below(primes, D))
    return s * s


def weight_gpy(n: int, spec: WeightSpec, table: PrimeTable | None = None) -> float:
    """Tapered weight for P(n) = prod (n + h_j); smoothed when kind is SmoothedMP."""
    if spec.kind not in ("GPY", "SmoothedMP"):
        raise InvalidArgument(f"weight_gpy needs GPY or SmoothedMP, got {spec.kind}")
    if spec.D < 2:
        return 1.0
    primes = _prime_set((n + h for h in spec.tuple.h), table)
    if spec.kind == "SmoothedMP":
        bound = spec.D**spec.omega
        primes = [p for p in primes if p < bound]
    s = math.fsum(
        float(lambda_gpy_taper(d, spec.D, spec.k, spec.ell)) for d in _squarefree_divisors_below(primes, spec.D)
    )
    return s * s


# --- multidimensional weights -------------------------------------------------


def coprime_squarefree_upto(D: int, Z: int) -> list[int]:
    return [m for m in range(1, D + 1) if math.gcd(m, Z) == 1 and factorize(m).is_squarefree]


def maynard_support(k: int, D: int, Z: int) -> list[tuple[int, ...]]:
    """k-tuples with squarefree product <= D coprime to Z, by product-ordered descent."""
    base = coprime_squarefree_upto(D, Z)
    out: list[tuple[int, ...]] = []

    def walk(prefix: tuple[int, ...], prod: int):
        if len(prefix) == k:
            out.append(prefix)
            return
        for m in base:
            if prod * m > D:
                break
            if math.gcd(m, prod) == 1:
                walk(prefix + (m,), prod * m)

    walk((), 1)
    return sorted(out, key=lambda t: (math.prod(t), t))


def _component_divisors(w: tuple[int, ...]) -> list[tuple[int, ...]]:
    from itertools import product

    from .arith import squarefree_divisors

    return list(product(*(squarefree_divisors(factorize(x).primes) for x in w)))


def _check_simplex_supported(F, k: int) -> None:
    if isinstance(F, SimplexPolynomial):
        if F.k != k:
            raise InvalidArgument(f"F has dimension {F.k}, tuple has k = {k}")
        return
    if not callable(F):
        raise InvalidArgument("F must be a SimplexPolynomial or a callable")
    probes = [tuple(Fraction(3, 2) if i == j else Fraction(0) for i in range(k)) for j in range(k)]
    probes.append(tuple(Fraction(2, k) for _ in range(k)))
    for pt in probes:
        if F(*pt) != 0:
            raise InvalidArgument(f"F is nonzero outside the simplex at {pt}")


def eta_from_F(spec: WeightSpec) -> EtaTable:
    """``eta(w) = F(log w_1/log D, ..., log w_k/log D)`` on the support."""
    if spec.kind != "Maynard":
        raise InvalidArgument("eta_from_F needs the Maynard kind")
    k, D, Z = spec.k, spec.D, spec.presift.Z
    _check_simplex_supported(spec.F, k)
    entries = {}
    for w in maynard_support(k, D, Z):
        pt = tuple(log_ratio(x, D) if D >= 2 else Fraction(0) for x in w)
        total = sum(pt)
        if total > 1:
            pt = tuple(x / total for x in pt)  # product == D; rounding overshot the face
        v = Fraction(spec.F(*pt))
        if v:
            entries[w] = v
    return EtaTable(entries, D=D, k=k, Z=Z)


def eta_from_values(values: dict, D: int, k: int, Z: int) -> EtaTable:
    """EtaTable from arbitrary values; keys outside the support are rejected."""
    allowed = set(maynard_support(k, D, Z))
    bad = [w for w in values if tuple(w) not in allowed and values[w]]
    if bad:
        raise InvalidArgument(f"eta keys outside the support: {bad[:5]}")
    return EtaTable({tuple(w): Fraction(v) for w, v in values.items() if v}, D=D, k=k, Z=Z)


def lambda_from_eta(eta: EtaTable, spec: WeightSpec | None = None) -> LambdaTable:
    """Selberg's change of variables, eta -> lambda.

    ``lambda(d) = prod mu(d_i) d_i * sum_{d_i | w_i} eta(w) / prod phi(w_i)``
    where ``w`` runs over the eta support (squarefree, coprime to Z).
    """
    acc: dict[tuple[int, ...], Fraction] = {}
    for w, v in eta.entries.items():
        if not v:
            continue
        term = v / math.prod(euler_phi(x) for x in w)
        for d in _component_divisors(w):
            acc[d] = acc.get(d, Fraction(0)) + term
    entries = {}
    for d, s in acc.items():
        sign = math.prod(mobius(x) for x in d)
        val = sign * math.prod(d) * s
        if val:
            entries[d] = val
    return LambdaTable(entries, D=eta.D, k=eta.k, Z=eta.Z)


def eta_from_lambda(lambdas: LambdaTable) -> EtaTable:
    """The forward map, ``eta(w) = prod mu(w_i) phi(w_i) sum_{w_i | d_i} lambda(d)/prod d_i``."""
    acc: dict[tuple[int, ...], Fraction] = {}
    for d, v in lambdas.entries.items():
        if not v:
            continue
        term = v / math.prod(d)
        for w in _component_divisors(d):
            acc[w] = acc.get(w, Fraction(0)) + term
    entries = {}
    for w, s in acc.items():
        val = math.prod(mobius(x) * euler_phi(x) for x in w) * s
        if val:
            entries[w] = val
    return EtaTable(entries, D=lambdas.D, k=lambdas.k, Z=lambdas.Z)


def crt_key(key: tuple[int, ...], h: tuple[int, ...]) -> tuple[int, int]:
    """Residue ``r`` mod ``prod key`` with ``key_j | r + h_j`` for all j."""
    r, m = 0, 1
    for d, hj in zip(key, h):
        if d == 1:
            continue
        target = (-hj) % d
        # solve r + m*t = target (mod d); moduli are coprime
        t = ((target - r) * pow(m, -1, d)) % d
        r, m = r + m * t, m * d
    return r % m, m


def weight_maynard(n: int, lambdas: LambdaTable, spec: WeightSpec) -> Fraction:
    """``(sum_{d_j | n + h_j} lambda(d))^2`` for ``n = c0 mod Z``."""
    ps = spec.presift
    if n % ps.Z != ps.c0:
        raise DomainError(f"n = {n} is not {ps.c0} mod {ps.Z}")
    h = spec.tuple.h
    s = Fraction(0)
    for key, v in lambdas.entries.items():
        if all((n + hj) % d == 0 for d, hj in zip(key, h)):
            s += v
    return s * s


@dataclass
class Eta1Value:
    u: int
    exact: Fraction  # from lambda, defining formula
    exact_rearranged: Fraction  # first line of the rearranged form
    approx: Fraction  # w_2 = u term with the u*gamma/phi^2 factor dropped
    discrepancy: Fraction
    bound: Fraction  # rigorous bound on |exact - approx|
    shape: float  # eta_max * log D / Y
    factor: Fraction = field(default=Fraction(1))  # u gamma(u) / phi(u)^2

    @property
    def measured_constant(self) -> float:
        return float(self.discrepancy) / self.shape if self.shape else 0.0


def _harmonic_phi(D: int, Z: int, power: int, extra_coprime: int = 1) -> Fraction:
    return sum(
        (Fraction(1, euler_phi(m) ** power) for m in coprime_squarefree_upto(D, Z * extra_coprime)),
        Fraction(0),
    )


def eta1_from_eta(u: int, eta: EtaTable, presift: Presift, lambdas: LambdaTable | None = None) -> Eta1Value:
    """Exact and approximate one-dimensional eta for the k = 2 pipeline.

    ``exact`` is ``mu(u) gamma(u) sum_{u | d} lambda(1, d) / phi(d)``;
    ``approx`` keeps only the ``w_2 = u`` terms and drops the factor
    ``u gamma(u)/phi(u)^2``.  ``bound`` dominates ``|exact - approx|``:
    ``eta_max * H * (sum_{p|u} 1/(p-1)^2 + sum_{1 < v <= D/u} 1/phi(v)^2)``
    with ``H = sum_{w <= D} 1/phi(w)`` over squarefree ``w`` coprime to Z.
    """
    if eta.k != 2:
        raise InvalidArgument("eta1 is defined for k = 2")
    Z, D = presift.Z, eta.D
    if math.gcd(u, Z) > 1:
        raise DomainError(f"u = {u} shares a factor with Z = {Z}")
    fu = factorize(u)
    if not fu.is_squarefree:
        raise DomainError(f"u = {u} is not squarefree")
    lambdas = lambdas if lambdas is not None else lambda_from_eta(eta)
    g = gamma_u(fu)
    exact = mobius(fu) * g * sum(
        (v / euler_phi(d[1]) for d, v in lambdas.entries.items() if d[0] == 1 and d[1] % u == 0),
        Fraction(0),
    )
    rearr = Fraction(0)
    direct = Fraction(0)
    for (w1, w2), v in eta.entries.items():
        if w2 % u == 0:
            rearr += v * mobius(w2) / (euler_phi(w1) * euler_phi(w2) ** 2)
        if w2 == u:
            direct += v / euler_phi(w1)
    rearr *= u * g * mobius(fu)
    phi_u = euler_phi(fu)
    factor = Fraction(u * g, phi_u**2)
    H = _harmonic_phi(D, Z, 1)
    tail = _harmonic_phi(D // u, Z, 2, extra_coprime=u) - 1
    local = sum((Fraction(1, (p - 1) ** 2) for p in fu.primes), Fraction(0))
    bound = eta.max_abs * H * (local + tail)
    shape = float(eta.max_abs) * (math.log(D) if D > 1 else 0.0) / presift.Y
    return Eta1Value(
        u=u,
        exact=exact,
        exact_rearranged=rearr,
        approx=direct,
        discrepancy=abs(exact - direct),
        bound=bound,
        shape=shape,
        factor=factor,
    )


def eta1_table(eta: EtaTable, presift: Presift, lambdas: LambdaTable | None = None) -> dict[int, Eta1Value]:
    """``eta1_from_eta`` for every ``u`` that can carry a nonzero value."""
    lambdas = lambdas if lambdas is not None else lambda_from_eta(eta)
    from .arith import squarefree_divisors

    us = sorted({u for (_, w2) in eta.entries for u in squarefree_divisors(factorize(w2).primes)})
    return {u: eta1_from_eta(u, eta, presift, lambdas) for u in us}
