"""Primes, quadratic characters and the prime decompositions used by the assembly.

Every function here is pure. Primality is decided by trial division, which is
deterministic and fast for the orders this package ever touches (well below
2**32).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterable, Literal

from .errors import DecompositionFailure, InvalidArgument, NotFound

DEFAULT_EPS = 0.3

Objective = Literal["deviation", "height"]


@lru_cache(maxsize=65536)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    limit = math.isqrt(n)
    f = 5
    while f <= limit:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


def _check_odd_prime(q: int) -> None:
    if not isinstance(q, int) or q < 3 or not is_prime(q):
        raise InvalidArgument(f"{q!r} is not an odd prime")


def legendre_symbol(k: int, q: int) -> int:
    """Quadratic character of ``k`` modulo the odd prime ``q`` (0 at ``k = 0``)."""
    _check_odd_prime(q)
    if not 0 <= k < q:
        raise InvalidArgument(f"residue {k} out of range for modulus {q}")
    if k == 0:
        return 0
    # Euler's criterion
    return 1 if pow(k, (q - 1) // 2, q) == 1 else -1


@lru_cache(maxsize=4096)
def quadratic_residues(q: int) -> frozenset[int]:
    """Nonzero squares modulo the odd prime ``q``; always ``(q - 1) / 2`` of them."""
    _check_odd_prime(q)
    return frozenset(j * j % q for j in range(1, q))


def find_prime_in(lo: int, hi: int, target: int) -> int:
    """Prime in ``[lo, hi]`` closest to ``target``, ties going to the smaller prime."""
    if not lo <= target <= hi:
        raise InvalidArgument(f"target {target} outside [{lo}, {hi}]")
    for d in range(0, max(target - lo, hi - target) + 1):
        for p in (target - d, target + d):
            if lo <= p <= hi and is_prime(p):
                return p
    raise NotFound(f"no prime in [{lo}, {hi}]")


def eps_band(n: int, eps: float, parts: int = 4) -> tuple[float, float]:
    """Closed interval ``[(1 - eps) n / parts, (1 + eps) n / parts]``."""
    return (1 - eps) * n / parts, (1 + eps) * n / parts


@lru_cache(maxsize=8192)
def _odd_primes_in(lo: int, hi: int) -> tuple[int, ...]:
    return tuple(p for p in range(max(lo, 3), hi + 1) if is_prime(p))


def odd_primes_in_band(lo: float, hi: float) -> tuple[int, ...]:
    return _odd_primes_in(math.ceil(lo), math.floor(hi))


@dataclass(frozen=True)
class PrimeQuadruple:
    """``n = q1 + q2 + q3 + q4`` with every prime inside the eps-band around n/4.

    ``q`` is stored in descending order, so ``q[-1]`` is the smallest prime.
    """

    n: int
    eps: float
    q: tuple[int, int, int, int]

    def __post_init__(self):
        if tuple(sorted(self.q, reverse=True)) != self.q:
            raise InvalidArgument("primes must be sorted descending")
        if sum(self.q) != self.n:
            raise InvalidArgument(f"{self.q} does not sum to {self.n}")
        lo, hi = eps_band(self.n, self.eps)
        for p in self.q:
            if not (lo <= p <= hi and p % 2 == 1 and is_prime(p)):
                raise InvalidArgument(f"{p} is not an odd prime in [{lo}, {hi}]")

    @property
    def max_deviation(self) -> float:
        return max(abs(p - self.n / 4) for p in self.q)


@dataclass(frozen=True)
class OddDecomposition:
    """``n = m + q1 + q2 + q3`` with ``m`` an even Hadamard order."""

    n: int
    eps: float
    m: int
    q: tuple[int, int, int]

    def __post_init__(self):
        if tuple(sorted(self.q, reverse=True)) != self.q:
            raise InvalidArgument("primes must be sorted descending")
        if self.m + sum(self.q) != self.n:
            raise InvalidArgument(f"{self.m} + {self.q} does not sum to {self.n}")
        lo, hi = eps_band(self.n, self.eps)
        if not (lo <= self.m <= hi and self.m % 2 == 0):
            raise InvalidArgument(f"m={self.m} is not an even order in [{lo}, {hi}]")
        for p in self.q:
            if not (lo <= p <= hi and p % 2 == 1 and is_prime(p)):
                raise InvalidArgument(f"{p} is not an odd prime in [{lo}, {hi}]")

    @property
    def max_deviation(self) -> float:
        return max(abs(x - self.n / 4) for x in (self.m, *self.q))


def _tuples_summing_to(total: int, pool: tuple[int, ...], k: int) -> list[tuple[int, ...]]:
    """All ascending ``k``-multisets from ``pool`` whose sum is ``total``."""
    if k == 1:
        return [(total,)] if total in pool else []
    members = set(pool)
    out = []
    for head in combinations_with_replacement(pool, k - 1):
        last = total - sum(head)
        if last >= head[-1] and last in members:
            out.append((*head, last))
    return out


def _check_search_args(eps: float, objective: str) -> None:
    if not 0 < eps < 1:
        raise InvalidArgument(f"eps must lie in (0, 1), got {eps}")
    if objective not in ("deviation", "height"):
        raise InvalidArgument(f"unknown objective {objective!r}")


def _deviation_levels(center: float, values: Iterable[int]) -> list[float]:
    return sorted({abs(v - center) for v in values})


def decompose_even(n: int, eps: float = DEFAULT_EPS, objective: Objective = "deviation") -> PrimeQuadruple:
    """Split an even ``n`` into four odd primes near ``n / 4``.

    ``objective="deviation"`` minimises the largest ``|q_j - n/4|``.
    ``objective="height"`` first maximises the smallest prime (so ``n - 4 q_4``,
    the height of the random bottom block in the assembly, is minimal) and
    breaks ties by the largest deviation. Remaining ties go to the
    lexicographically smallest ascending tuple.
    """
    if n < 1 or n % 2:
        raise InvalidArgument(f"decompose_even needs a positive even n, got {n}")
    _check_search_args(eps, objective)
    center = n / 4
    band = odd_primes_in_band(*eps_band(n, eps))
    if objective == "height":
        found = _tuples_summing_to(n, band, 4)
        if found:
            best = min(found, key=lambda t: (-t[0], max(abs(p - center) for p in t), t))
            return PrimeQuadruple(n, eps, tuple(sorted(best, reverse=True)))
    else:
        # grow a symmetric window around n/4 until some quadruple fits inside it
        for level in _deviation_levels(center, band):
            pool = tuple(p for p in band if abs(p - center) <= level)
            found = _tuples_summing_to(n, pool, 4)
            if found:
                return PrimeQuadruple(n, eps, tuple(sorted(min(found), reverse=True)))
    raise DecompositionFailure(f"no four-prime decomposition of {n} at eps={eps}")


def decompose_odd(
    n: int, eps: float, orders: Iterable[int], objective: Objective = "deviation"
) -> OddDecomposition:
    """Split an odd ``n`` into an even Hadamard order plus three odd primes near ``n / 4``.

    With ``objective="deviation"`` the largest deviation from ``n / 4`` over the
    order and the primes is minimised; ``"height"`` first maximises the
    smallest of the four parts. Ties prefer the order closest to ``n / 4``,
    then the smaller order, then the smallest ascending prime triple.
    """
    if n < 1 or n % 2 == 0:
        raise InvalidArgument(f"decompose_odd needs a positive odd n, got {n}")
    _check_search_args(eps, objective)
    center = n / 4
    lo, hi = eps_band(n, eps)
    ms = sorted(m for m in set(orders) if m % 2 == 0 and lo <= m <= hi)
    band = odd_primes_in_band(lo, hi)
    if ms and band:
        levels = [math.inf] if objective == "height" else _deviation_levels(center, [*ms, *band])
        for level in levels:
            pool = tuple(p for p in band if abs(p - center) <= level)
            found = []
            for m in ms:
                if abs(m - center) > level:
                    continue
                for triple in _tuples_summing_to(n - m, pool, 3):
                    dev = max(abs(x - center) for x in (m, *triple))
                    lead = -min(m, triple[0]) if objective == "height" else 0
                    found.append((lead, dev, abs(m - center), m, triple))
            if found:
                *_, m, triple = min(found)
                return OddDecomposition(n, eps, m, tuple(sorted(triple, reverse=True)))
    raise DecompositionFailure(f"no odd decomposition of {n} at eps={eps}")
