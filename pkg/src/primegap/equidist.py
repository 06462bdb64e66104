"""Primes in arithmetic progressions: exact counts and the error sums
``E_l(x, Q) = sum_{q <= Q} tau_l(q) max_{(a,q)=1} |pi(x;a,q) - li(x)/phi(q)|``
together with the smooth-moduli variant summed over roots of P.

Everything here is measurement; nothing asserts an asymptotic rate.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .arith import PrimeTable, euler_phi, factorize, logarithmic_integral, tau_l
from .errors import InvalidArgument, TableRangeError, UnsupportedError
from .tuples import Tuple

SMOOTH_CAVEAT = (
    "moduli restricted by smoothness as displayed; the exact hypotheses of the "
    "smoothed sieve are not pinned down, so totals are indicative only"
)


@dataclass
class ModulusRow:
    q: int
    witness_a: int
    max_error: float
    tau_weight: int
    root_count: int | None = None
    root_error_sum: float | None = None


@dataclass
class EquidistReport:
    x: int
    Q: int
    l: int
    per_q: list[ModulusRow]
    E_total: float
    theta_equivalent: float
    meta: dict = field(default_factory=dict)

    @property
    def normalized(self) -> float:
        return self.E_total / self.x

    def recompute_total(self) -> float:
        if self.meta.get("variant") == "smooth_roots":
            return math.fsum(r.root_error_sum for r in self.per_q)
        return math.fsum(r.tau_weight * r.max_error for r in self.per_q)


def _check_x(x: int, table: PrimeTable) -> None:
    if x > table.limit:
        raise TableRangeError(f"x = {x} exceeds prime table limit {table.limit}")


def pi_in_progression(x: int, a: int, q: int, table: PrimeTable) -> int:
    """Number of primes ``n < x`` with ``n = a (mod q)``."""
    _check_x(x, table)
    if q < 1 or not 0 <= a < q:
        raise InvalidArgument(f"need q >= 1 and 0 <= a < q, got a={a}, q={q}")
    return int(np.count_nonzero(table.primes_below(x) % q == a))


def progression_counts(x: int, q: int, table: PrimeTable) -> np.ndarray:
    """``pi(x; a, q)`` for every ``a`` in ``[0, q)``."""
    _check_x(x, table)
    return np.bincount(table.primes_below(x) % q, minlength=q)


def coprime_residues(q: int) -> np.ndarray:
    a = np.arange(q)
    return a[np.gcd(a, q) == 1]


def partition_identity(x: int, q: int, table: PrimeTable) -> tuple[int, int]:
    """Both sides of ``sum_{(a,q)=1} pi(x;a,q) + #{p | q, p < x} = pi(x)``."""
    counts = progression_counts(x, q, table)
    lhs = int(counts[coprime_residues(q)].sum()) + sum(1 for p in factorize(q).primes if p < x)
    return lhs, table.pi(x)


def _max_error_row(x: int, q: int, l: int, li_x: float, table: PrimeTable) -> ModulusRow:
    counts = progression_counts(x, q, table)
    res = coprime_residues(q)
    errs = np.abs(counts[res] - li_x / euler_phi(q))
    i = int(np.argmax(errs))  # first maximum: smallest witness
    return ModulusRow(q=q, witness_a=int(res[i]), max_error=float(errs[i]), tau_weight=tau_l(l, q))


def _map(fn, items, threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def error_sum_El(x: int, Q: int, l: int, table: PrimeTable, threads: int = 1) -> EquidistReport:
    """``E_l(x, Q)`` with the per-modulus maxima and their witnesses."""
    if Q < 1:
        raise InvalidArgument("Q must be >= 1")
    _check_x(x, table)
    li_x = logarithmic_integral(x)
    rows = _map(lambda q: _max_error_row(x, q, l, li_x, table), range(1, Q + 1), threads)
    total = math.fsum(r.tau_weight * r.max_error for r in rows)
    theta = math.log(Q) / math.log(x) if Q > 1 else 0.0
    return EquidistReport(x=x, Q=Q, l=l, per_q=rows, E_total=total, theta_equivalent=theta, meta={"li_x": li_x})


def level_scan(x: int, theta_grid, table: PrimeTable, threads: int = 1) -> list[EquidistReport]:
    """``E_1(x, floor(x^theta))`` along a grid of levels."""
    out = []
    for theta in theta_grid:
        if not 0 < theta < 1:
            raise InvalidArgument(f"theta must lie in (0, 1), got {theta}")
        Q = max(1, math.floor(x**theta))
        rep = error_sum_El(x, Q, 1, table, threads)
        rep.meta.update(theta_requested=theta, normalized=rep.E_total / x)
        out.append(rep)
    return out


def roots_of_P_mod_q(t: Tuple, q: int) -> list[int]:
    """All ``a mod q`` with ``prod_j (a + h_j) = 0 (mod q)``, for squarefree ``q``."""
    if q < 1:
        raise InvalidArgument("q must be >= 1")
    f = factorize(q)
    if not f.is_squarefree:
        raise UnsupportedError(f"roots are only built for squarefree moduli, got {q}")
    per_prime = [(p, sorted({(-h) % p for h in t.h})) for p in f.primes]
    roots = []
    for choice in product(*(rs for _, rs in per_prime)):
        a, m = 0, 1
        for (p, _), r in zip(per_prime, choice):
            a = a + m * (((r - a) * pow(m, -1, p)) % p)
            m *= p
        roots.append(a % q)
    return sorted(roots)


def smooth_squarefree_moduli(Q: int, bound: float | None) -> list[int]:
    """Squarefree ``q <= Q`` whose prime factors are all below ``bound`` (None: no limit)."""
    out = []
    for q in range(1, Q + 1):
        f = factorize(q)
        if f.is_squarefree and (bound is None or all(p < bound for p in f.primes)):
            out.append(q)
    return out


def root_weighted_scan(
    x: int, Q: int, t: Tuple, table: PrimeTable, smooth_bound: float | None = None, threads: int = 1
) -> EquidistReport:
    """``sum_q sum_{(a,q)=1, P(a)=0 (q)} |pi(x;a,q) - li(x)/phi(q)|`` over squarefree q."""
    _check_x(x, table)
    li_x = logarithmic_integral(x)

    def row(q: int) -> ModulusRow:
        counts = progression_counts(x, q, table)
        roots = [a for a in roots_of_P_mod_q(t, q) if math.gcd(a, q) == 1]
        target = li_x / euler_phi(q)
        errs = [abs(int(counts[a]) - target) for a in roots]
        if errs:
            i = int(np.argmax(errs))
            wit, mx = roots[i], errs[i]
        else:
            wit, mx = -1, 0.0
        return ModulusRow(q, wit, float(mx), 1, root_count=len(roots), root_error_sum=math.fsum(errs))

    rows = _map(row, smooth_squarefree_moduli(Q, smooth_bound), threads)
    total = math.fsum(r.root_error_sum for r in rows)
    theta = math.log(Q) / math.log(x) if Q > 1 else 0.0
    meta = {"variant": "smooth_roots", "smooth_bound": smooth_bound, "li_x": li_x, "tuple": list(t.h)}
    return EquidistReport(x=x, Q=Q, l=1, per_q=rows, E_total=total, theta_equivalent=theta, meta=meta)


def smooth_moduli_scan(x: int, theta: float, omega: float, t: Tuple, table: PrimeTable, threads: int = 1) -> EquidistReport:
    """Root-weighted error sum over ``x^omega``-smooth squarefree ``q <= x^theta``."""
    if not 0 < omega < 1:
        raise InvalidArgument(f"omega must lie in (0, 1), got {omega}")
    Q = max(1, math.floor(x**theta))
    rep = root_weighted_scan(x, Q, t, table, smooth_bound=x**omega, threads=threads)
    rep.meta.update(theta=theta, omega=omega, caveat=SMOOTH_CAVEAT)
    return rep


def cauchy_ratio(x: int, Q: int, table: PrimeTable, l: int = 3) -> dict:
    """``E_l(x,Q)^2 / (x (log Q)^(l^2) E_1(x,Q))``, reported as a measurement."""
    El = error_sum_El(x, Q, l, table).E_total
    E1 = error_sum_El(x, Q, 1, table).E_total
    denom = x * math.log(Q) ** (l * l) * E1 if Q > 1 else float("nan")
    return {"x": x, "Q": Q, "l": l, "E_l": El, "E_1": E1, "ratio": El * El / denom if denom else float("nan")}
