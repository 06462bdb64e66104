"""Number-theoretic primitives: the prime table, factorization and the
multiplicative functions that every sieve weight is built from.

Counting conventions follow the strict inequality used throughout the
package: ``pi(x)`` is the number of primes ``p < x``.
"""

from __future__ import annotations

import math
import os
import struct
import zlib
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from pathlib import Path

import numpy as np
from scipy import integrate

from .errors import DomainError, InvalidArgument, PrimeGapError, TableRangeError

SEGMENT_SIZE = 1 << 20  # odd entries per sieve segment
SPF_CAP = 1 << 22  # largest n served from the smallest-prime-factor array

CACHE_MAGIC = b"PGL1"
_HEADER = struct.Struct("<4sQI")

LI_2 = 1.0451637801174927848445888891946131365226155781512  # li(2)


def simple_sieve(n: int) -> np.ndarray:
    """Boolean primality array of length ``n + 1`` (plain Eratosthenes)."""
    flags = np.ones(n + 1, dtype=bool)
    flags[: min(2, n + 1)] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return flags


def _sieve_odd_flags(limit: int, segment_size: int) -> np.ndarray:
    # flags[i] <-> 2*i + 1 is prime, for 2*i + 1 < limit
    n_odd = limit // 2
    flags = np.zeros(n_odd, dtype=bool)
    if n_odd == 0:
        return flags
    base = np.flatnonzero(simple_sieve(math.isqrt(limit) + 1))
    base = base[base > 2]
    for lo in range(0, n_odd, segment_size):
        hi = min(lo + segment_size, n_odd)
        seg = np.ones(hi - lo, dtype=bool)
        lo_val = 2 * lo + 1
        for p in base:
            p = int(p)
            if p * p >= 2 * hi + 1:
                break
            start = max(p * p, ((lo_val + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            seg[(start - lo_val) // 2 :: p] = False
        flags[lo:hi] = seg
    flags[0] = False  # 1 is not prime
    return flags


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Primality oracle for integers in ``[0, limit)``.

    ``bits`` packs one flag per odd integer (bit ``i`` is ``2*i + 1``,
    little-endian bit order); 2 is handled separately.
    """

    limit: int
    bits: np.ndarray
    prime_list: np.ndarray

    def _check(self, n: int) -> None:
        if n >= self.limit:
            raise TableRangeError(f"{n} is outside the prime table (limit {self.limit})")

    def is_prime(self, n: int) -> bool:
        n = int(n)
        self._check(n)
        if n < 2:
            return False
        if n % 2 == 0:
            return n == 2
        i = n // 2
        return bool((self.bits[i >> 3] >> (i & 7)) & 1)

    def pi(self, x: int) -> int:
        """Number of primes strictly below ``x``."""
        if x > self.limit:
            raise TableRangeError(f"pi({x}) needs a table with limit >= {x}")
        return int(np.searchsorted(self.prime_list, x, side="left"))

    def primes_below(self, x: int) -> np.ndarray:
        return self.prime_list[: self.pi(x)]

    def is_prime_array(self, lo: int, hi: int) -> np.ndarray:
        """Boolean primality flags for the integers ``lo, lo+1, ..., hi-1``."""
        if hi > self.limit:
            raise TableRangeError(f"range end {hi} exceeds table limit {self.limit}")
        lo = max(lo, 0)
        out = np.zeros(max(hi - lo, 0), dtype=bool)
        if hi <= lo:
            return out
        ps = self.prime_list[np.searchsorted(self.prime_list, lo) : np.searchsorted(self.prime_list, hi)]
        out[ps - lo] = True
        return out

    @cached_property
    def spf(self) -> np.ndarray:
        """Smallest-prime-factor array for ``n < min(limit, SPF_CAP)``."""
        m = min(self.limit, SPF_CAP)
        spf = np.zeros(m, dtype=np.int32)
        for p in self.prime_list:
            p = int(p)
            if p * p >= m:
                break
            block = spf[p * p :: p]
            block[block == 0] = p
        idx = np.arange(m, dtype=np.int32)
        zero = spf == 0
        spf[zero] = idx[zero]
        return spf


def build_prime_table(limit: int, segment_size: int = SEGMENT_SIZE) -> PrimeTable:
    """Segmented odd-only sieve of Eratosthenes over ``[2, limit)``."""
    if limit < 2:
        raise InvalidArgument(f"limit must be >= 2, got {limit}")
    flags = _sieve_odd_flags(limit, segment_size)
    return _table_from_odd_flags(limit, flags)


def _table_from_odd_flags(limit: int, flags: np.ndarray) -> PrimeTable:
    odd_primes = 2 * np.flatnonzero(flags).astype(np.int64) + 1
    primes = odd_primes if limit <= 2 else np.concatenate([[2], odd_primes]).astype(np.int64)
    bits = np.packbits(flags, bitorder="little")
    primes.setflags(write=False)
    bits.setflags(write=False)
    return PrimeTable(limit=limit, bits=bits, prime_list=primes)


# --- cache file -----------------------------------------------------------


def cache_dir() -> Path:
    return Path(os.environ.get("PRIMEGAP_CACHE", "./.cache"))


def cache_path(limit: int, directory: str | os.PathLike | None = None) -> Path:
    return Path(directory if directory is not None else cache_dir()) / f"primes-{limit}.bin"


def save_prime_table(table: PrimeTable, directory: str | os.PathLike | None = None) -> Path:
    path = cache_path(table.limit, directory)
    payload = table.bits.tobytes()
    header = _HEADER.pack(CACHE_MAGIC, table.limit, zlib.crc32(payload))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(header + payload)
    except OSError as exc:
        raise OSError(f"cannot write prime cache {path}: {exc}") from exc
    return path


def load_prime_table(path: str | os.PathLike) -> PrimeTable:
    """Read a ``primes-<limit>.bin`` cache; raises PrimeGapError on corruption."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise PrimeGapError(f"{path}: truncated header")
    magic, limit, checksum = _HEADER.unpack_from(raw)
    payload = raw[_HEADER.size :]
    if magic != CACHE_MAGIC:
        raise PrimeGapError(f"{path}: bad magic {magic!r}")
    if zlib.crc32(payload) != checksum:
        raise PrimeGapError(f"{path}: checksum mismatch")
    n_odd = limit // 2
    flags = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), bitorder="little")[:n_odd].astype(bool)
    if flags.size != n_odd:
        raise PrimeGapError(f"{path}: payload too short for limit {limit}")
    return _table_from_odd_flags(limit, flags)


def cached_prime_table(limit: int, directory: str | os.PathLike | None = None) -> PrimeTable:
    """Load the table from cache when valid, else sieve and write it."""
    path = cache_path(limit, directory)
    if path.exists():
        try:
            return load_prime_table(path)
        except PrimeGapError:
            pass  # stale or corrupt; rebuild below
    table = build_prime_table(limit)
    save_prime_table(table, directory)
    return table


# --- counting ---------------------------------------------------------------


def count_twins(x: int, table: PrimeTable) -> int:
    """Number of ``n < x`` with ``n`` and ``n + 2`` both prime."""
    if x + 2 > table.limit:
        raise TableRangeError(f"count_twins({x}) needs table limit >= {x + 2}")
    ps = table.primes_below(x)
    if ps.size == 0:
        return 0
    nxt = ps + 2
    ok = nxt < table.limit
    idx = np.searchsorted(table.prime_list, nxt[ok])
    idx = np.minimum(idx, table.prime_list.size - 1)
    return int(np.count_nonzero(table.prime_list[idx] == nxt[ok]))


# --- factorization and multiplicative functions -----------------------------


@dataclass(frozen=True)
class Factorization:
    n: int
    prime_powers: tuple[tuple[int, int], ...]

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.prime_powers)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.prime_powers)


def _trial_factor(n: int, primes) -> list[tuple[int, int]]:
    out = []
    for p in primes:
        p = int(p)
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    if n > 1:
        out.append((n, 1))
    return out


def factorize(n: int, table: PrimeTable | None = None) -> Factorization:
    """Exact factorization; spf lookup inside the table, trial division beyond."""
    n = int(n)
    if n < 1:
        raise InvalidArgument(f"cannot factor {n}")
    if table is not None and n < min(table.limit, SPF_CAP):
        spf = table.spf
        pp: dict[int, int] = {}
        m = n
        while m > 1:
            p = int(spf[m])
            pp[p] = pp.get(p, 0) + 1
            m //= p
        return Factorization(n, tuple(sorted(pp.items())))
    if table is not None and table.limit > math.isqrt(n):
        return Factorization(n, tuple(_trial_factor(n, table.prime_list)))
    return Factorization(n, tuple(_trial_factor(n, _odd_trial_divisors(n))))


def _odd_trial_divisors(n: int):
    yield 2
    d = 3
    while d * d <= n:
        yield d
        d += 2


def _fac(f: Factorization | int) -> Factorization:
    return f if isinstance(f, Factorization) else factorize(f)


def mobius(f: Factorization | int) -> int:
    f = _fac(f)
    if not f.is_squarefree:
        return 0
    return -1 if len(f.prime_powers) % 2 else 1


def euler_phi(f: Factorization | int) -> int:
    f = _fac(f)
    out = 1
    for p, e in f.prime_powers:
        out *= p ** (e - 1) * (p - 1)
    return out


def gamma_u(f: Factorization | int) -> int:
    """Product of ``p - 2`` over the primes dividing an odd squarefree ``u``."""
    f = _fac(f)
    if f.n % 2 == 0 or not f.is_squarefree:
        raise DomainError(f"gamma_u is defined for odd squarefree u, got {f.n}")
    out = 1
    for p, _ in f.prime_powers:
        out *= p - 2
    return out


def tau_l(l: int, f: Factorization | int) -> int:
    """Number of ordered ``l``-tuples of positive integers with product ``n``."""
    if l < 1:
        raise InvalidArgument(f"tau_l needs l >= 1, got {l}")
    f = _fac(f)
    out = 1
    for _, e in f.prime_powers:
        out *= math.comb(e + l - 1, l - 1)
    return out


def phi_lcm_identity(d: int, f: int) -> tuple[int, int]:
    """Both sides of ``phi(d) phi(f) = phi([d, f]) sum_{u | (d, f)} gamma(u)``.

    Defined for odd squarefree ``d`` and ``f``; integers, no division.
    """
    g = math.gcd(d, f)
    rhs_sum = sum(gamma_u(u) for u in squarefree_divisors(factorize(g).primes))
    return euler_phi(d) * euler_phi(f), euler_phi(d * f // g) * rhs_sum


def is_squarefree(n: int) -> bool:
    return _fac(n).is_squarefree


def squarefree_divisors(primes) -> list[int]:
    """All products of subsets of ``primes`` (the divisors of a squarefree number)."""
    primes = list(primes)
    out = []
    for r in range(len(primes) + 1):
        for combo in combinations(primes, r):
            out.append(math.prod(combo))
    return out


def divisors(f: Factorization | int) -> list[int]:
    f = _fac(f)
    divs = [1]
    for p, e in f.prime_powers:
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def mobius_log_moment(n: int, j: int) -> float:
    """``sum_{d | n} mu(d) (log d)^j`` for squarefree ``n``."""
    f = _fac(n)
    if not f.is_squarefree:
        raise DomainError(f"{f.n} is not squarefree")
    if j < 0:
        raise InvalidArgument("j must be >= 0")
    terms = []
    for r in range(len(f.primes) + 1):
        for combo in combinations(f.primes, r):
            logd = math.fsum(math.log(p) for p in combo)
            terms.append((-1) ** r * logd**j)
    return math.fsum(terms)


def logarithmic_integral(x: float) -> float:
    """li(x) for x >= 2, as li(2) plus the integral of 1/log t from 2 to x.

    The integral is taken in the variable u = log t, where the integrand
    e^u / u is smooth and monotone.
    """
    if x < 2:
        raise DomainError(f"li(x) is only provided for x >= 2, got {x}")
    if x == 2:
        return LI_2
    val, _ = integrate.quad(
        lambda u: math.exp(u) / u, math.log(2.0), math.log(x), epsabs=0.0, epsrel=1e-13, limit=200
    )
    return LI_2 + val
