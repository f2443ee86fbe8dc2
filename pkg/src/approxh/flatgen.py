"""±1 vectors over Z_q with nearly flat Fourier magnitudes, and their circulants.

The starting point is the quadratic character, whose Fourier transform has
magnitude exactly sqrt(q) away from frequency 0. Filling the zero and flipping
a sparse random subset of residues to -1 lifts the zero frequency to about
sqrt(q) while moving the others by O(q^{1/4} sqrt(log q)).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CertificationFailure, FlatnessFailure, InvalidArgument
from .numtheory import _check_odd_prime, legendre_symbol

log = logging.getLogger(__name__)

# Frozen by scripts/calibrate_flat.py; see README for the pilot protocol.
C_FLAT = 1.2
MAX_RETRIES = 50


def delta_target(q: int, c_flat: float = C_FLAT) -> float:
    """Relative flatness tolerance ``c_flat * q^{-1/4} * sqrt(log q)``."""
    return c_flat * q ** -0.25 * math.sqrt(math.log(q))


def legendre_vector(q: int) -> np.ndarray:
    _check_odd_prime(q)
    return np.array([legendre_symbol(k, q) for k in range(q)], dtype=np.int8)


def dft_magnitudes(v) -> np.ndarray:
    """``|sum_k v(k) exp(2 pi i j k / q)|`` for ``j = 0..q-1``, by the direct O(q^2) sum.

    Phases are taken from a table indexed by ``j*k mod q`` so that no large
    angle ever reaches ``exp``.
    """
    v = np.asarray(v)
    q = v.shape[0]
    if v.ndim != 1 or q < 1:
        raise InvalidArgument("dft_magnitudes needs a nonempty vector")
    roots = np.exp(2j * np.pi * np.arange(q) / q)
    idx = np.arange(q)
    phase = roots[np.outer(idx, idx) % q]
    return np.abs(phase @ v.astype(complex))


@dataclass(frozen=True, eq=False)
class FlatVector:
    q: int
    entries: np.ndarray = field(repr=False)
    fourier_mags: np.ndarray = field(repr=False)
    delta_observed: float
    delta_target: float
    attempts: int

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "entries": "".join("+" if x > 0 else "-" for x in self.entries),
            "delta_observed": self.delta_observed,
            "delta_target": self.delta_target,
            "attempts": self.attempts,
        }


def flatness(mags: np.ndarray, q: int) -> float:
    """Largest relative deviation ``| |û(j)| / sqrt(q) - 1 |``."""
    return float(np.max(np.abs(mags / math.sqrt(q) - 1.0)))


def sample_flat_vector(
    q: int,
    rng: np.random.Generator,
    c_flat: float = C_FLAT,
    max_retries: int = MAX_RETRIES,
) -> FlatVector:
    """Draw u_q until its spectrum is within ``sqrt(q) * delta_q`` of ``sqrt(q)`` everywhere."""
    _check_odd_prime(q)
    v = legendre_vector(q)
    residues = np.flatnonzero(v == 1)
    base = np.where(v == 1, 1, -1).astype(np.int8)
    p_flip = q ** -0.5
    target = delta_target(q, c_flat)
    for attempt in range(1, max_retries + 1):
        u = base.copy()
        u[residues[rng.random(residues.size) < p_flip]] = -1
        mags = dft_magnitudes(u)
        observed = flatness(mags, q)
        if observed <= target:
            log.debug("q=%d accepted after %d attempts (delta=%.4g)", q, attempt, observed)
            u.flags.writeable = False
            return FlatVector(q, u, mags, observed, target, attempt)
    raise FlatnessFailure(
        f"no flat vector for q={q} in {max_retries} attempts at c_flat={c_flat}"
    )


def circulant_matrix(u) -> np.ndarray:
    """Row ``i`` is ``u`` cyclically shifted right by ``i``."""
    u = np.asarray(u)
    if u.ndim != 1 or not np.all(np.abs(u) == 1):
        raise InvalidArgument("circulant generator must be a ±1 vector")
    q = u.size
    idx = np.arange(q)
    return u[(idx[None, :] - idx[:, None]) % q].astype(np.int8)


@dataclass(frozen=True)
class CirculantCertificate:
    q: int
    gram_deviation: float
    bound: float


def gram_deviation(U) -> float:
    """Operator norm of ``U Uᵀ - q I`` from the extreme eigenvalues of the exact integer Gram."""
    # ±1 products sum to integers of size <= q, which float64 holds exactly
    U = np.asarray(U, dtype=np.float64)
    q = U.shape[0]
    ev = np.linalg.eigvalsh(U @ U.T - q * np.eye(q))
    return float(max(abs(ev[0]), abs(ev[-1])))


def certify_gram(U, delta_q: float) -> CirculantCertificate:
    q = np.asarray(U).shape[0]
    dev = gram_deviation(U)
    bound = 3 * delta_q * q
    if dev > bound:
        raise CertificationFailure(f"||U Uᵀ - qI|| = {dev:.6g} exceeds 3 delta_q q = {bound:.6g}")
    return CirculantCertificate(q, dev, bound)
