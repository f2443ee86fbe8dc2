"""Exact Hadamard matrices: Sylvester doubling, Paley type I, Kronecker products.

Orders reachable from these three constructions are collected once in an
immutable :class:`OrderRegistry`; it answers "is order m constructible" and
"which constructible even order is nearest to n".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

from .errors import InvalidArgument, NotFound, SizeLimit
from .numtheory import is_prime, legendre_symbol

DEFAULT_CAP = 8192

Provenance = Literal["sylvester", "paley", "kronecker"]


@dataclass(frozen=True, eq=False)
class HadamardMatrix:
    order: int
    entries: np.ndarray = field(repr=False)
    provenance: Provenance

    def __post_init__(self):
        if self.entries.shape != (self.order, self.order):
            raise InvalidArgument("entries do not match the declared order")


def verify_hadamard(H) -> bool:
    """True iff ``H`` is a ±1 matrix with ``H Hᵀ = n I`` in exact integer arithmetic."""
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise InvalidArgument(f"expected a square matrix, got shape {H.shape}")
    if not np.all(np.abs(H) == 1):
        return False
    n = H.shape[0]
    # every partial sum of ±1 products is an integer of size <= n, so float64
    # BLAS is exact here while integer matmul would be far slower
    Hf = H.astype(np.float64)
    return bool(np.array_equal(Hf @ Hf.T, n * np.eye(n)))


def _checked(entries: np.ndarray, provenance: Provenance) -> HadamardMatrix:
    if not verify_hadamard(entries):
        raise AssertionError(f"{provenance} construction produced a non-Hadamard matrix")
    entries.flags.writeable = False
    return HadamardMatrix(entries.shape[0], entries, provenance)


def sylvester(k: int, cap: int = DEFAULT_CAP) -> HadamardMatrix:
    if k < 0:
        raise InvalidArgument("k must be nonnegative")
    if 2**k > cap:
        raise SizeLimit(f"order 2^{k} exceeds cap {cap}")
    H = np.ones((1, 1), dtype=np.int8)
    for _ in range(k):
        H = np.block([[H, H], [H, -H]])
    return _checked(H, "sylvester")


def paley(q: int, cap: int = DEFAULT_CAP) -> HadamardMatrix:
    """Paley type I matrix of order ``q + 1`` for a prime ``q = 3 (mod 4)``."""
    if not (is_prime(q) and q % 4 == 3):
        raise InvalidArgument(f"Paley I needs a prime q = 3 mod 4, got {q}")
    if q + 1 > cap:
        raise SizeLimit(f"order {q + 1} exceeds cap {cap}")
    chi = np.array([legendre_symbol(k, q) for k in range(q)], dtype=np.int8)
    idx = np.arange(q)
    # Jacobsthal matrix Q[i, j] = chi(j - i); antisymmetric since chi(-1) = -1
    Q = chi[(idx[None, :] - idx[:, None]) % q]
    S = np.zeros((q + 1, q + 1), dtype=np.int8)
    S[0, 1:] = 1
    S[1:, 0] = -1
    S[1:, 1:] = Q
    return _checked(S + np.eye(q + 1, dtype=np.int8), "paley")


def kronecker(a: HadamardMatrix, b: HadamardMatrix, cap: int = DEFAULT_CAP) -> HadamardMatrix:
    if a.order * b.order > cap:
        raise SizeLimit(f"order {a.order * b.order} exceeds cap {cap}")
    if a.order == 1:
        return b
    if b.order == 1:
        return a
    return _checked(np.kron(a.entries, b.entries).astype(np.int8), "kronecker")


def _power_of_two(m: int) -> int | None:
    if m >= 1 and m & (m - 1) == 0:
        return m.bit_length() - 1
    return None


class OrderRegistry:
    """Closure of ``{2^k} ∪ {q + 1 : q prime, q = 3 mod 4}`` under products, up to ``cap``.

    Built once; read-only afterwards.
    """

    def __init__(self, cap: int = DEFAULT_CAP):
        self.cap = cap
        base = {1}
        base.update(2**k for k in range(cap.bit_length()) if 2**k <= cap)
        base.update(q + 1 for q in range(3, cap) if q % 4 == 3 and is_prime(q))
        # recipe[m] = (a, b) with m = a * b, or None for base orders
        recipe: dict[int, tuple[int, int] | None] = {m: None for m in base}
        frontier = sorted(base)
        while frontier:
            fresh = []
            for a in frontier:
                for b in sorted(base):
                    m = a * b
                    if b == 1 or m > self.cap:
                        continue
                    if m not in recipe:
                        recipe[m] = (a, b)
                        fresh.append(m)
            frontier = fresh
        self._recipe = recipe
        self.orders = frozenset(recipe)

    def __contains__(self, m: int) -> bool:
        return m in self._recipe

    def available_order_near(self, n: int, eps: float) -> int:
        """Even constructible order in ``[(1-eps) n, (1+eps) n]`` closest to ``n``; ties pick the smaller."""
        if n < 2:
            raise InvalidArgument("n must be at least 2")
        lo, hi = (1 - eps) * n, (1 + eps) * n
        hits = [m for m in self.orders if m % 2 == 0 and lo <= m <= hi]
        if not hits:
            raise NotFound(f"no constructible even order in [{lo}, {hi}]")
        return min(hits, key=lambda m: (abs(m - n), m))

    def build(self, m: int) -> HadamardMatrix:
        if m not in self._recipe:
            if m > self.cap:
                raise SizeLimit(f"order {m} exceeds cap {self.cap}")
            raise NotFound(f"order {m} is not constructible")
        return _build(self, m)


@lru_cache(maxsize=256)
def _build(registry: OrderRegistry, m: int) -> HadamardMatrix:
    k = _power_of_two(m)
    if k is not None:
        return sylvester(k, registry.cap)
    pair = registry._recipe[m]
    if pair is None:
        return paley(m - 1, registry.cap)
    a, b = pair
    return kronecker(_build(registry, a), _build(registry, b), registry.cap)


@lru_cache(maxsize=8)
def default_registry(cap: int = DEFAULT_CAP) -> OrderRegistry:
    return OrderRegistry(cap)


def available_order_near(n: int, eps: float, cap: int = DEFAULT_CAP) -> int:
    return default_registry(cap).available_order_near(n, eps)
