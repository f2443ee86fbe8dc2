"""Dense spectral certification of real matrices.

All extremes come from a full singular value decomposition; nothing here is
iterative, so a report is as trustworthy as LAPACK's backward error.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidArgument

# s_min is treated as zero below this fraction of s_max
ZERO_RTOL = 1e-12


@dataclass(frozen=True)
class SpectralReport:
    rows: int
    cols: int
    s_min: float
    s_max: float
    kappa: float
    op_norm: float
    hs_norm: float
    method: str
    tol: float

    def to_dict(self) -> dict:
        return asdict(self)


def _as_finite(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise InvalidArgument(f"expected a 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidArgument("matrix has non-finite entries")
    return A


def singular_values(A) -> np.ndarray:
    """All singular values, descending."""
    A = _as_finite(A)
    if A.size == 0:
        return np.zeros(0)
    return np.linalg.svd(A, compute_uv=False)


def singular_extremes(A) -> tuple[float, float]:
    """``(s_min, s_max)`` where ``s_min`` is the ``min(rows, cols)``-th singular value."""
    s = singular_values(A)
    if s.size == 0:
        return 0.0, 0.0
    return float(s[-1]), float(s[0])


def _kappa(s_min: float, s_max: float) -> float:
    if s_max == 0 or s_min <= ZERO_RTOL * s_max:
        return math.inf
    return s_max / s_min


def condition_number(A) -> float:
    return _kappa(*singular_extremes(A))


def operator_norm(A) -> float:
    return singular_extremes(A)[1]


def hs_norm(A) -> float:
    return float(np.linalg.norm(_as_finite(A), "fro"))


def spectral_report(A) -> SpectralReport:
    A = _as_finite(A)
    s_min, s_max = singular_extremes(A)
    rows, cols = A.shape
    return SpectralReport(
        rows=rows,
        cols=cols,
        s_min=s_min,
        s_max=s_max,
        kappa=_kappa(s_min, s_max),
        op_norm=s_max,
        hs_norm=hs_norm(A),
        method="lapack-gesdd",
        # standard backward-error estimate for a Householder-based SVD
        tol=float(np.finfo(float).eps * max(rows, cols, 1) * s_max),
    )


def batch_condition_numbers(stack: np.ndarray) -> np.ndarray:
    """Condition numbers of a stack of matrices shaped ``(k, n, m)``."""
    s = np.linalg.svd(np.asarray(stack, dtype=float), compute_uv=False)
    s_max, s_min = s[:, 0], s[:, -1]
    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = s_max / s_min
    kappa[(s_min <= ZERO_RTOL * s_max) | (s_max == 0)] = np.inf
    return kappa


def s_min_upper_bound(M, k: int) -> float:
    """Upper bound on the smallest singular value of a square ``M``.

    With ``H`` the span of columns ``k+1..n``, returns the smallest distance
    from one of the first ``k`` columns to ``H``.
    """
    M = _as_finite(M)
    n = M.shape[0]
    if M.shape != (n, n):
        raise InvalidArgument("s_min_upper_bound needs a square matrix")
    if not 1 <= k < n:
        raise InvalidArgument(f"k must satisfy 1 <= k < {n}, got {k}")
    # Q spans span(tail) whenever tail has full column rank; if it does not,
    # M is singular and any nonnegative value is a valid bound
    Q, _ = np.linalg.qr(M[:, k:])
    head = M[:, :k]
    residual = head - Q @ (Q.T @ head)
    return float(np.min(np.linalg.norm(residual, axis=0)))
