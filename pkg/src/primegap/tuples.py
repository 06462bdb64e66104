"""Admissible k-tuples and the pre-sifting residue class.

A tuple ``h_1 < ... < h_k`` is admissible when, for every prime ``p``,
the shifts ``h_j`` miss at least one residue class mod ``p``.  Only primes
``p <= k`` can fail this, since ``k`` shifts cannot cover ``p > k`` classes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .arith import PrimeTable, build_prime_table
from .errors import InadmissibleError, InvalidArgument, TableRangeError, WindowTooSmallError


@dataclass(frozen=True)
class Tuple:
    h: tuple[int, ...]

    def __post_init__(self):
        h = tuple(int(x) for x in self.h)
        if not h:
            raise InvalidArgument("a tuple needs at least one shift")
        if any(b <= a for a, b in zip(h, h[1:])):
            raise InvalidArgument(f"shifts must be strictly increasing: {h}")
        object.__setattr__(self, "h", h)

    @property
    def k(self) -> int:
        return len(self.h)

    @property
    def diameter(self) -> int:
        return self.h[-1] - self.h[0]

    def shifted(self, c: int) -> "Tuple":
        return Tuple(tuple(x + c for x in self.h))

    def to_json(self) -> str:
        return json.dumps(list(self.h))

    @classmethod
    def from_json(cls, text: str) -> "Tuple":
        data = json.loads(text)
        if isinstance(data, dict):
            data = data["h"]
        return cls(tuple(sorted(int(x) for x in data)))

    @classmethod
    def load(cls, path) -> "Tuple":
        return cls.from_json(Path(path).read_text())


def residue_counts(t: Tuple, p: int) -> int:
    return len({x % p for x in t.h})


def is_admissible(t: Tuple, table: PrimeTable) -> bool:
    if table.limit <= t.k:
        raise TableRangeError(f"need a prime table with limit > k = {t.k}")
    for p in table.primes_below(t.k + 1):
        if residue_counts(t, int(p)) >= p:
            return False
    return True


def obstruction(t: Tuple, table: PrimeTable) -> int | None:
    """Smallest prime whose residue classes are all hit by ``t``, or None."""
    for p in table.primes_below(t.k + 1):
        if residue_counts(t, int(p)) >= p:
            return int(p)
    return None


def shifted_primes_tuple(k: int, table: PrimeTable) -> Tuple:
    """The first ``k`` primes above ``k``, translated to start at 0."""
    if k < 1:
        raise InvalidArgument("k must be >= 1")
    start = table.pi(k + 1) if k + 1 <= table.limit else table.prime_list.size
    ps = table.prime_list[start : start + k]
    if ps.size < k:
        raise TableRangeError(f"prime table holds fewer than {k} primes above {k}")
    return Tuple(tuple(int(p - ps[0]) for p in ps))


def greedy_sieve(k: int, length: int, primes) -> np.ndarray:
    """Survivors of ``[0, length)`` after removing one class per prime.

    Primes are processed in increasing order; each removes the residue
    class holding the fewest current survivors (smallest residue on ties).
    """
    xs = np.arange(length)
    alive = np.ones(length, dtype=bool)
    for p in primes:
        counts = np.bincount(xs[alive] % p, minlength=p)
        alive &= xs % p != int(np.argmin(counts))
    return xs[alive]


def greedy_tuple(k: int, window: int, table: PrimeTable) -> Tuple:
    """Narrow admissible ``k``-tuple from greedy sieving inside ``[0, window)``.

    Every sieve length ``L`` in ``[k, window]`` is tried with
    :func:`greedy_sieve`; among the survivors the narrowest run of ``k``
    consecutive elements is kept, and the overall narrowest is returned
    (shortest ``L``, then leftmost run, on ties).
    """
    if window < k:
        raise InvalidArgument(f"window {window} is smaller than k = {k}")
    primes = [int(p) for p in table.primes_below(k + 1)]
    best = None
    for length in range(k, window + 1):
        s = greedy_sieve(k, length, primes)
        if s.size < k:
            continue
        widths = s[k - 1 :] - s[: s.size - k + 1]
        i = int(np.argmin(widths))
        if best is None or widths[i] < best[0]:
            best = (int(widths[i]), s[i : i + k])
    if best is None:
        raise WindowTooSmallError(f"fewer than {k} survivors in [0, {window})")
    return Tuple(tuple(int(x) for x in best[1]))


def primes_up_to(y: float) -> list[int]:
    n = int(math.floor(y))
    if n < 2:
        return []
    return [int(p) for p in build_prime_table(n + 1).prime_list]


@dataclass(frozen=True)
class Presift:
    """Residue class ``n = c0 mod Z`` with ``Z`` the product of primes ``<= Y``."""

    Y: float
    Z: int
    c0: int
    h: tuple[int, ...] = ()

    @property
    def primes(self) -> list[int]:
        return primes_up_to(self.Y)

    def contains(self, n: int) -> bool:
        return n % self.Z == self.c0


def default_Y(N: float) -> float:
    return max(math.log(math.log(N)), 3.0) if N > math.e else 3.0


def build_presift(t: Tuple, Y: float) -> Presift:
    ps = primes_up_to(Y)
    Z = math.prod(ps)
    c0 = None
    for c in range(Z):
        if all(math.gcd(Z, c + h) == 1 for h in t.h):
            c0 = c
            break
    if c0 is None:
        bad = next(p for p in ps if len({h % p for h in t.h}) >= p)
        raise InadmissibleError(f"tuple {t.h} covers every class mod {bad}; no c0 exists")
    return Presift(Y=float(Y), Z=Z, c0=c0, h=t.h)
