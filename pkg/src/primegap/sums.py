"""Weighted sums over ranges of n, and exact expansion oracles.

Scalar weights (SelbergTwin, GPY, SmoothedMP) are summed in floating
point with correctly rounded ``math.fsum``.  Multidimensional weights are
summed exactly: lambdas are scaled to integers by a common denominator and
the inner sums are accumulated as Python integers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import PrimeTable, euler_phi, factorize, gamma_u, mobius
from .equidist import roots_of_P_mod_q
from .errors import InvalidArgument, TableRangeError, UnsupportedError
from .tuples import Presift, Tuple
from .variational import SimplexPolynomial, build_forms, gpy_ratio_closed_form
from .weights import (
    EtaTable,
    LambdaTable,
    WeightSpec,
    coprime_squarefree_upto,
    crt_key,
    eta1_table,
    lambda_from_eta,
    log_ratio,
    maynard_support,
    scalar_lambda_table,
)

Range = tuple[int, int]


@dataclass
class SumReport:
    range: Range
    kind: str
    T1: float | Fraction
    T2: float | Fraction | None = None
    rho: float = 1.0
    theta: float | None = None
    predicted_ratio: float | None = None
    empirical_ratio: float | None = None
    partials: list[tuple[int, int, float | Fraction, float | Fraction | None]] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def excess_ratio(self) -> float | None:
        """``(T2 - T1) / T1``."""
        if self.T2 is None or not self.T1:
            return None
        return float((self.T2 - self.T1) / self.T1)


def naive_detector_sum(x: int, table: PrimeTable) -> dict:
    """``sum_{n < x} (pi-indicator(n) + pi-indicator(n + 2) - 1)``, exact."""
    if x > table.limit - 2:
        raise TableRangeError(f"naive_detector_sum({x}) needs table limit >= {x + 2}")
    if x <= 1:
        return {"x": x, "value": 0, "two_pi_minus_x": 2 * table.pi(max(x, 0)) - x}
    value = table.pi(x) + (table.pi(x + 2) - table.pi(3)) - (x - 1)
    return {"x": x, "value": value, "two_pi_minus_x": 2 * table.pi(x) - x}


# --- range plumbing ------------------------------------------------------------


def _split(rng: Range, parts: int) -> list[Range]:
    start, stop = rng
    parts = max(1, min(parts, max(stop - start, 1)))
    edges = [start + (stop - start) * i // parts for i in range(parts + 1)]
    return [(edges[i], edges[i + 1]) for i in range(parts)]


def _check_table(rng: Range, h: tuple[int, ...], table: PrimeTable) -> None:
    top = rng[1] - 1 + max(h)
    if rng[1] > rng[0] and top >= table.limit:
        raise TableRangeError(f"n + h up to {top} exceeds prime table limit {table.limit}")


def _map(fn, items, threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def _prime_hits(start: int, stop: int, h, table: PrimeTable) -> np.ndarray:
    hits = np.zeros(max(stop - start, 0), dtype=np.int64)
    for hj in h:
        hits += table.is_prime_array(start + hj, stop + hj)
    return hits


# --- scalar kinds ---------------------------------------------------------------


def scalar_inner_sums(start: int, stop: int, h: tuple[int, ...], lambdas: dict[int, float]) -> np.ndarray:
    """``sum_{d | P(n)} lambda(d)`` for ``n`` in ``[start, stop)``."""
    t = Tuple(h)
    inner = np.zeros(max(stop - start, 0))
    for d, v in lambdas.items():
        for r in roots_of_P_mod_q(t, d):
            first = (r - start) % d
            inner[first::d] += v
    return inner


def _scalar_chunk(args):
    (start, stop), h, lam, table, want_t2 = args
    w = scalar_inner_sums(start, stop, h, lam) ** 2
    t1 = math.fsum(w)
    t2 = math.fsum(w * _prime_hits(start, stop, h, table)) if want_t2 else None
    return start, stop, t1, t2


# --- multidimensional kind -------------------------------------------------------


def _common_denominator(values) -> int:
    L = 1
    for v in values:
        L = L * v.denominator // math.gcd(L, v.denominator)
    return L


def maynard_inner_sums(start: int, stop: int, lambdas: LambdaTable, presift: Presift, h) -> tuple[np.ndarray, int, int]:
    """Integer inner sums scaled by ``L`` at ``n = c0 (mod Z)`` in ``[start, stop)``.

    Returns ``(inner, n0, L)``: ``inner[i]`` belongs to ``n0 + i*Z``.
    """
    Z, c0 = presift.Z, presift.c0
    n0 = start + (c0 - start) % Z
    count = max(0, (stop - n0 + Z - 1) // Z)
    inner = np.zeros(count, dtype=object)
    inner[:] = 0
    L = _common_denominator(lambdas.entries.values())
    for key, v in lambdas.entries.items():
        r, m = crt_key(key, h)
        # n = r (mod m) and n = c0 (mod Z); m is coprime to Z
        R = r + m * (((c0 - r) * pow(m, -1, Z)) % Z) if Z > 1 else r
        first = n0 + (R - n0) % (m * Z)
        i0 = (first - n0) // Z
        if i0 < count:
            inner[i0::m] += int(v * L)
    return inner, n0, L


def _maynard_chunk(args):
    (start, stop), h, lambdas, presift, table, want_t2 = args
    inner, n0, L = maynard_inner_sums(start, stop, lambdas, presift, h)
    sq = [int(v) * int(v) for v in inner]
    t1 = Fraction(sum(sq), L * L)
    t2 = None
    if want_t2:
        hits = _prime_hits(start, stop, h, table)
        idx = n0 - start + presift.Z * np.arange(len(sq))
        t2 = Fraction(sum(s * int(hits[i]) for s, i in zip(sq, idx)), L * L)
    return start, stop, t1, t2


# --- public sums -------------------------------------------------------------------


def _resolve_lambdas(spec: WeightSpec, lambdas: LambdaTable | None, table: PrimeTable | None) -> LambdaTable:
    if lambdas is not None:
        return lambdas
    if spec.kind == "Maynard":
        from .weights import eta_from_F

        return lambda_from_eta(eta_from_F(spec))
    return scalar_lambda_table(spec, table)


def _run(rng: Range, spec: WeightSpec, lambdas, table, parts, threads, want_t2):
    h = spec.tuple.h
    _check_table(rng, h, table)
    lambdas = _resolve_lambdas(spec, lambdas, table)
    chunks = _split(rng, parts)
    if spec.kind == "Maynard":
        jobs = [(c, h, lambdas, spec.presift, table, want_t2) for c in chunks]
        partials = _map(_maynard_chunk, jobs, threads)
        t1 = sum((p[2] for p in partials), Fraction(0))
        t2 = sum((p[3] for p in partials), Fraction(0)) if want_t2 else None
    else:
        lam = {d: float(v) for d, v in lambdas.entries.items()}
        jobs = [(c, h, lam, table, want_t2) for c in chunks]
        partials = _map(_scalar_chunk, jobs, threads)
        t1 = math.fsum(p[2] for p in partials)
        t2 = math.fsum(p[3] for p in partials) if want_t2 else None
    return t1, t2, partials


def sum_T1(rng: Range, spec: WeightSpec, lambdas: LambdaTable | None, table: PrimeTable, parts: int = 1, threads: int = 1) -> SumReport:
    """``sum W(n)`` over the range (restricted to ``n = c0 mod Z`` for Maynard)."""
    t1, _, partials = _run(rng, spec, lambdas, table, parts, threads, want_t2=False)
    return SumReport(range=tuple(rng), kind=spec.kind, T1=t1, partials=partials)


def predicted_ratio(spec: WeightSpec, theta: float) -> float:
    """Trend target for ``T2/T1``; asymptotic, never a pass/fail bound."""
    if spec.kind == "Maynard":
        return theta / 2 * float(build_forms(spec.k, [spec.F]).ratio())
    k, ell = (2, 0) if spec.kind == "SelbergTwin" else (spec.k, spec.ell)
    return theta / 2 * float(gpy_ratio_closed_form(k, ell))


def sum_T2(
    rng: Range,
    spec: WeightSpec,
    lambdas: LambdaTable | None,
    table: PrimeTable,
    theta: float = 0.5,
    rho: float = 1.0,
    parts: int = 1,
    threads: int = 1,
) -> SumReport:
    """``T1`` and ``T2 = sum (sum_j [n + h_j prime]) W(n)`` with ratio diagnostics."""
    t1, t2, partials = _run(rng, spec, lambdas, table, parts, threads, want_t2=True)
    emp = float(t2 / t1) if t1 else None
    return SumReport(
        range=tuple(rng),
        kind=spec.kind,
        T1=t1,
        T2=t2,
        rho=rho,
        theta=theta,
        predicted_ratio=predicted_ratio(spec, theta),
        empirical_ratio=emp,
        partials=partials,
        meta={"note": "predicted_ratio is an asymptotic trend target"},
    )


# --- expansion oracle ---------------------------------------------------------------


def crt_general(congruences) -> tuple[int, int] | None:
    """Solve ``n = r_i (mod m_i)`` with arbitrary moduli; None if inconsistent."""
    r, m = 0, 1
    for ri, mi in congruences:
        g = math.gcd(m, mi)
        if (ri - r) % g:
            return None
        lcm = m // g * mi
        t = ((ri - r) // g * pow(m // g, -1, mi // g)) % (mi // g) if mi // g > 1 else 0
        r, m = (r + m * t) % lcm, lcm
    return r, m


def count_in_progression(start: int, stop: int, r: int, m: int) -> int:
    """``#{n in [start, stop) : n = r (mod m)}`` by floor arithmetic."""
    if stop <= start:
        return 0
    return (stop - 1 - r) // m - (start - 1 - r) // m


def expansion_oracle_T1(rng: Range, lambdas: LambdaTable, presift: Presift, h: tuple[int, ...] | None = None) -> Fraction:
    """``sum_{d,f} lambda(d) lambda(f) #{n : n = c0 (Z), [d_j,f_j] | n + h_j}``, exact."""
    h = tuple(h if h is not None else presift.h)
    items = list(lambdas.entries.items())
    total = Fraction(0)
    start, stop = rng
    for d, vd in items:
        for f, vf in items:
            cong = [(presift.c0, presift.Z)]
            cong += [((-hj) % math.lcm(a, b), math.lcm(a, b)) for a, b, hj in zip(d, f, h)]
            sol = crt_general(cong)
            if sol is None:
                continue
            total += vd * vf * count_in_progression(start, stop, *sol)
    return total


# --- S0 and S1 ----------------------------------------------------------------------


def s0_direct(lambdas: LambdaTable) -> Fraction:
    """``sum lambda(d) lambda(f) / prod [d_j, f_j]`` over ``(d_i f_i, d_j f_j) = 1``, i != j."""
    items = list(lambdas.entries.items())
    total = Fraction(0)
    for d, vd in items:
        for f, vf in items:
            prods = [a * b for a, b in zip(d, f)]
            if any(math.gcd(prods[i], prods[j]) > 1 for i in range(len(d)) for j in range(i + 1, len(d))):
                continue
            total += vd * vf / math.prod(math.lcm(a, b) for a, b in zip(d, f))
    return total


@dataclass
class S0Report:
    full: Fraction  # four-index eta form
    main: Fraction  # diagonal v1 = v2 = 1 terms
    bound: Fraction  # rigorous bound on |full - main|
    shape: float  # eta_max^2 (log D)^2 / Y

    @property
    def defect(self) -> Fraction:
        return abs(self.full - self.main)

    @property
    def measured_constant(self) -> float:
        return float(self.defect) / self.shape if self.shape else 0.0


def s0_eta(eta: EtaTable, presift: Presift) -> S0Report:
    """S0 through eta for k = 2: the four-index form and its diagonal truncation."""
    if eta.k != 2:
        raise UnsupportedError("the eta form of S0 is implemented for k = 2")
    D, Z = eta.D, presift.Z
    full = Fraction(0)
    main = Fraction(0)
    phi = {}
    for u1, u2, v1, v2 in maynard_support(4, D, Z):
        a = eta[(u1 * v1, u2 * v2)]
        if not a:
            continue
        b = eta[(u1 * v2, u2 * v1)]
        if not b:
            continue
        for x in (u1, u2, v1, v2):
            if x not in phi:
                phi[x] = euler_phi(x)
        term = a * b / (phi[u1] * phi[u2]) * Fraction(mobius(v1) * mobius(v2), (phi[v1] * phi[v2]) ** 2)
        full += term
        if v1 == 1 and v2 == 1:
            main += term
    base = coprime_squarefree_upto(D, Z)
    H = sum((Fraction(1, euler_phi(m)) for m in base), Fraction(0))
    V = sum((Fraction(1, euler_phi(m) ** 2) for m in base), Fraction(0))
    bound = eta.max_abs**2 * H * H * (V * V - 1)
    shape = float(eta.max_abs) ** 2 * (math.log(D) ** 2 if D > 1 else 0.0) / presift.Y
    return S0Report(full=full, main=main, bound=bound, shape=shape)


def s1_direct(lambdas: LambdaTable) -> Fraction:
    """``sum_{d,f} lambda(1,d) lambda(1,f) / phi([d,f])``."""
    items = [(d[1], v) for d, v in lambdas.entries.items() if d[0] == 1]
    total = Fraction(0)
    for d, vd in items:
        for f, vf in items:
            total += vd * vf / euler_phi(math.lcm(d, f))
    return total


def s1_eta(eta1: dict) -> Fraction:
    """``sum_u eta1(u)^2 / gamma(u)``; values may be Fractions or Eta1Value records."""
    total = Fraction(0)
    for u, val in eta1.items():
        v = val.exact if hasattr(val, "exact") else Fraction(val)
        if v:
            total += v * v / gamma_u(u)
    return total


def s1_eta_from_eta(eta: EtaTable, presift: Presift, lambdas: LambdaTable | None = None) -> Fraction:
    return s1_eta(eta1_table(eta, presift, lambdas))


# --- asymptotic targets -------------------------------------------------------------


def _as_poly(F, k: int) -> SimplexPolynomial:
    if not isinstance(F, SimplexPolynomial):
        raise UnsupportedError("asymptotic targets need a polynomial F")
    if F.k != k:
        raise InvalidArgument(f"F has dimension {F.k}, expected {k}")
    return F


def finite_main_sums(F: SimplexPolynomial, D: int, presift: Presift) -> tuple[float, float]:
    """The two arithmetic sums whose limits the asymptotic targets describe.

    ``sum mu^2(u1 u2) F(.,.)^2 / (phi(u1) phi(u2))`` over ``(u1 u2, Z) = 1`` and
    ``sum_u (1/gamma(u)) (sum_w mu^2(w u) F(log w, log u)/phi(w))^2``,
    evaluated in floating point.
    """
    Z = presift.Z
    pts = {}

    def val(a, b):
        key = (a, b)
        if key not in pts:
            pts[key] = float(F(log_ratio(a, D), log_ratio(b, D))) if D >= 2 else float(F(0, 0))
        return pts[key]

    first = math.fsum(
        val(u1, u2) ** 2 / (euler_phi(u1) * euler_phi(u2)) for u1, u2 in maynard_support(2, D, Z)
    )
    second_terms = []
    for u in coprime_squarefree_upto(D, Z):
        inner = math.fsum(
            val(w, u) / euler_phi(w) for w in coprime_squarefree_upto(D // u, Z) if math.gcd(w, u) == 1
        )
        second_terms.append(inner * inner / gamma_u(u))
    return first, math.fsum(second_terms)


def asymptotic_targets(F: SimplexPolynomial, D: int, presift: Presift, theta: float = 0.5, rho: float = 1.0) -> dict:
    """Limit expressions for the k = 2 main sums and the resulting multiplier.

    Integrals run over the simplex, where ``F`` is supported.
    """
    F = _as_poly(F, 2)
    I = (F * F).integrate()
    g1 = F.integrate_out(0)
    g2 = F.integrate_out(1)
    J1 = (g1 * g1).integrate()
    J2 = (g2 * g2).integrate()
    dens = Fraction(euler_phi(presift.Z), presift.Z)
    logD = math.log(D) if D > 1 else 0.0
    out = {
        "I": I,
        "J1": J1,
        "J2": J2,
        "target_S0": logD**2 * float(dens) ** 2 * float(I),
        "target_S1": logD**3 * float(dens) ** 3 * float(J1),
        "multiplier": theta / 2 * float(J1 + J2) - rho * float(I),
        "ratio": float((J1 + J2) / I) if I else None,
    }
    if D >= 1:
        a, b = finite_main_sums(F, D, presift)
        out["finite_S0_sum"] = a
        out["finite_S1_sum"] = b
    return out
