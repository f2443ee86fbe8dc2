"""Assemble a ±1 matrix of any order n whose condition number stays bounded.

Layout of ``W = Vᵀ`` for four square blocks ``B_1..B_4`` of orders
``b_1 >= b_2 >= b_3 >= b_4 = q`` (circulants of flat vectors, or one exact
Hadamard block when n is odd)::

    columns:   | b_1 | b_2 | b_3 | b_4 |
    top rows:  eps_jk * (first q rows of B_k)          4 block rows of q rows
    bottom:    row block j carries B_j's last b_j - q
               rows in column block j, fair coins
               elsewhere                                up to 3 block rows

Block rows whose height ``b_j - q`` is zero are dropped. Every output is
certified by a dense SVD; nothing here relies on the asymptotic constants.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from .config import RunConfig
from .errors import DecompositionFailure, InvalidArgument, ResampleExhausted
from .flatgen import certify_gram, circulant_matrix, delta_target, sample_flat_vector
from .hadamard import default_registry
from .numtheory import OddDecomposition, PrimeQuadruple, decompose_even, decompose_odd
from .spectral import SpectralReport, batch_condition_numbers, condition_number, operator_norm, spectral_report

log = logging.getLogger(__name__)

Branch = Literal["exact-hadamard", "even-general", "even-degenerate", "odd", "small-fallback"]

_WALSH4 = ((1, 1, 1, 1), (1, -1, 1, -1), (1, 1, -1, -1), (1, -1, -1, 1))

# stream tags for deriving independent sub-seeds from the master seed
_FLAT, _RESAMPLE, _FALLBACK = 1, 2, 3


def walsh4() -> np.ndarray:
    return np.array(_WALSH4, dtype=np.int8)


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng([seed, *key])


@dataclass(frozen=True)
class BlockPlan:
    n: int
    branch: Branch
    decomposition: PrimeQuadruple | OddDecomposition | int | None
    q: int = 0
    sizes: tuple[int, ...] = ()
    kinds: tuple[str, ...] = ()
    walsh_signs: tuple[tuple[int, ...], ...] = _WALSH4

    @property
    def col_extents(self) -> list[tuple[int, int]]:
        edges = np.concatenate([[0], np.cumsum(self.sizes)]).astype(int)
        return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]

    @property
    def top_rows(self) -> int:
        return 4 * self.q if self.sizes else 0

    @property
    def bottom_extents(self) -> list[tuple[int, int, int]]:
        """``(block j, first row, stop row)`` inside the bottom part; empty blocks omitted."""
        out, row = [], 0
        for j, b in enumerate(self.sizes[:3]):
            h = b - self.q
            if h > 0:
                out.append((j, row, row + h))
                row += h
        return out

    @property
    def bottom_rows(self) -> int:
        return self.n - self.top_rows if self.sizes else 0

    def to_dict(self) -> dict:
        dec = self.decomposition
        if isinstance(dec, (PrimeQuadruple, OddDecomposition)):
            dec = asdict(dec)
        return {
            "n": self.n,
            "branch": self.branch,
            "decomposition": dec,
            "q": self.q,
            "sizes": list(self.sizes),
            "kinds": list(self.kinds),
        }


def plan_blocks(n: int, config: RunConfig) -> BlockPlan:
    """Choose the construction branch for order ``n``."""
    if n < 1:
        raise InvalidArgument(f"order must be positive, got {n}")
    registry = default_registry(config.hadamard_cap)
    if n in registry:
        return BlockPlan(n, "exact-hadamard", n)
    try:
        if n % 2 == 0:
            dec = decompose_even(n, config.eps_decompose, config.decompose_objective)
            sizes, kinds = dec.q, ("circulant",) * 4
            branch = "even-general" if dec.q[2] > dec.q[3] else "even-degenerate"
        else:
            dec = decompose_odd(n, config.eps_decompose, registry.orders, config.decompose_objective)
            pairs = sorted([(dec.m, "hadamard"), *((p, "circulant") for p in dec.q)], reverse=True)
            sizes = tuple(p for p, _ in pairs)
            kinds = tuple(k for _, k in pairs)
            branch = "odd"
    except DecompositionFailure:
        if n <= config.small_n_max:
            return BlockPlan(n, "small-fallback", None)
        raise
    return BlockPlan(n, branch, dec, q=min(sizes), sizes=tuple(sizes), kinds=kinds)


@dataclass
class BlockInfo:
    kind: str
    order: int
    delta_observed: float | None = None
    delta_target: float | None = None
    attempts: int | None = None
    gram_deviation: float | None = None


def build_blocks(plan: BlockPlan, config: RunConfig, seed: int) -> tuple[list[np.ndarray], list[BlockInfo]]:
    """Square ±1 blocks in plan order.

    Each prime gets the flattest of ``config.flat_candidates`` accepted flat
    vectors. Equal primes share one circulant, which makes the Walsh
    cancellation between their top blocks exact.
    """
    registry = default_registry(config.hadamard_cap)
    cache: dict[int, tuple[np.ndarray, BlockInfo]] = {}
    blocks, infos = [], []
    for size, kind in zip(plan.sizes, plan.kinds):
        if kind == "hadamard":
            blocks.append(np.asarray(registry.build(size).entries))
            infos.append(BlockInfo("hadamard", size, 0.0, 0.0, 0, 0.0))
            continue
        if size not in cache:
            rng = _stream(seed, _FLAT, size)
            flat = min(
                (
                    sample_flat_vector(size, rng, config.c_flat, config.max_retries)
                    for _ in range(config.flat_candidates)
                ),
                key=lambda f: f.delta_observed,
            )
            U = circulant_matrix(flat.entries)
            cert = certify_gram(U, flat.delta_target)
            cache[size] = U, BlockInfo(
                "circulant", size, flat.delta_observed, flat.delta_target, flat.attempts, cert.gram_deviation
            )
        U, info = cache[size]
        blocks.append(U)
        infos.append(info)
    return blocks, infos


def build_w_top(blocks: list[np.ndarray], plan: BlockPlan) -> np.ndarray:
    """``4q x n`` matrix whose block ``(j, k)`` is ``walsh[j][k]`` times the top q rows of ``B_k``."""
    q = plan.q
    for B, size in zip(blocks, plan.sizes):
        if B.shape != (size, size) or size < q:
            raise InvalidArgument(f"block of shape {B.shape} does not fit plan size {size}")
    signs = np.asarray(plan.walsh_signs, dtype=np.int8)
    tops = [B[:q] for B in blocks]
    return np.vstack([np.hstack([signs[j, k] * tops[k] for k in range(4)]) for j in range(4)])


def s_support(plan: BlockPlan) -> np.ndarray:
    """Boolean mask of the positions carried by ``S`` inside the bottom part."""
    mask = np.zeros((plan.bottom_rows, plan.n), dtype=bool)
    cols = plan.col_extents
    for j, r0, r1 in plan.bottom_extents:
        c0, c1 = cols[j]
        mask[r0:r1, c0:c1] = True
    return mask


def build_s(blocks: list[np.ndarray], plan: BlockPlan) -> np.ndarray:
    """Bottom rows of ``B_1..B_3`` on the block diagonal of an ``(n - 4q) x n`` zero matrix."""
    S = np.zeros((plan.bottom_rows, plan.n), dtype=np.int8)
    cols = plan.col_extents
    for j, r0, r1 in plan.bottom_extents:
        B = blocks[j]
        if B.shape[0] - plan.q != r1 - r0:
            raise InvalidArgument("block height does not match the plan")
        c0, c1 = cols[j]
        S[r0:r1, c0:c1] = B[plan.q :]
    return S


def sample_r(plan: BlockPlan, rng: np.random.Generator) -> np.ndarray:
    """Fair ±1 coins off the support of ``S``, zeros on it."""
    R = rng.choice(np.array([-1, 1], dtype=np.int8), size=(plan.bottom_rows, plan.n))
    R[s_support(plan)] = 0
    return R


def r_norms(S: np.ndarray, R: np.ndarray) -> tuple[float, float]:
    """``(||S Rᵀ||, ||R||)``."""
    if R.size == 0:
        return 0.0, 0.0
    S = S.astype(float)
    R = R.astype(float)
    return operator_norm(S @ R.T), operator_norm(R)


def accept_r(S: np.ndarray, R: np.ndarray, eps: float, c_sr: float) -> bool:
    if S.shape != R.shape:
        raise InvalidArgument(f"S {S.shape} and R {R.shape} differ in shape")
    n = S.shape[1]
    sr, r = r_norms(S, R)
    return sr <= c_sr * math.sqrt(eps) * n and r <= 4 * math.sqrt(n)


@dataclass
class AssemblyReport:
    plan: BlockPlan
    spectral: SpectralReport
    seed: int
    r_resamples: int = 0
    w_top_deviation: float = 0.0
    s_norm: float = 0.0
    s_wtop_norm: float = 0.0
    sr_norm: float = 0.0
    r_norm: float = 0.0
    delta_q: float = 0.0
    blocks: list[BlockInfo] = field(default_factory=list)
    fallback_trials: int = 0

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k not in ("plan", "spectral", "blocks")}
        d["plan"] = self.plan.to_dict()
        d["spectral"] = self.spectral.to_dict()
        d["blocks"] = [asdict(b) for b in self.blocks]
        return d


def _all_sign_matrices(n: int) -> np.ndarray:
    bits = np.array(list(itertools.product((1, -1), repeat=n * n)), dtype=np.int8)
    return bits.reshape(-1, n, n)


def _fallback(n: int, config: RunConfig, seed: int) -> tuple[np.ndarray, int]:
    """Best-conditioned ±1 matrix among exhaustive (n <= 4) or random candidates."""
    if n <= 4:
        cands = _all_sign_matrices(n)
        kappa = batch_condition_numbers(cands)
        return cands[int(np.argmin(kappa))], len(cands)
    rng = _stream(seed, _FALLBACK, n)
    best, best_kappa = None, math.inf
    remaining, chunk = config.fallback_trials, 2000
    while remaining > 0:
        k = min(chunk, remaining)
        cands = rng.choice(np.array([-1, 1], dtype=np.int8), size=(k, n, n))
        kappa = batch_condition_numbers(cands)
        i = int(np.argmin(kappa))
        if kappa[i] < best_kappa:
            best, best_kappa = cands[i], float(kappa[i])
        remaining -= k
    return best, config.fallback_trials


def assemble(n: int, config: RunConfig | None = None, seed: int | None = None) -> tuple[np.ndarray, AssemblyReport]:
    """Return an ``n x n`` ±1 matrix ``V`` and its certificate.

    A pure function of ``(n, config, seed)``; ``seed`` defaults to ``config.seed``.
    """
    config = config or RunConfig()
    seed = config.seed if seed is None else seed
    plan = plan_blocks(n, config)

    if plan.branch == "exact-hadamard":
        V = np.array(default_registry(config.hadamard_cap).build(n).entries)
        return V, AssemblyReport(plan, spectral_report(V), seed)

    if plan.branch == "small-fallback":
        V, trials = _fallback(n, config, seed)
        return V, AssemblyReport(plan, spectral_report(V), seed, fallback_trials=trials)

    blocks, infos = build_blocks(plan, config, seed)
    w_top = build_w_top(blocks, plan)
    S = build_s(blocks, plan)
    # keep the best-conditioned of the first r_candidates accepted draws
    best, rejected = None, 0
    accepted = 0
    for attempt in range(config.max_resamples):
        R = sample_r(plan, _stream(seed, _RESAMPLE, n, attempt))
        if not accept_r(S, R, config.eps_accept, config.c_sr):
            rejected += 1
            continue
        V = np.ascontiguousarray(np.vstack([w_top, S + R]).T)
        kappa = condition_number(V)
        if best is None or kappa < best[0]:
            best = (kappa, V, R)
        accepted += 1
        if accepted == config.r_candidates:
            break
    if best is None:
        raise ResampleExhausted(f"no acceptable R for n={n} in {config.max_resamples} draws")
    _, V, R = best

    wt = w_top.astype(float)
    sr, r = r_norms(S, R)
    report = AssemblyReport(
        plan=plan,
        spectral=spectral_report(V),
        seed=seed,
        r_resamples=rejected,
        w_top_deviation=operator_norm(wt @ wt.T - n * np.eye(plan.top_rows)),
        s_norm=operator_norm(S) if S.size else 0.0,
        s_wtop_norm=operator_norm(S.astype(float) @ wt.T) if S.size else 0.0,
        sr_norm=sr,
        r_norm=r,
        delta_q=max(delta_target(b.order, config.c_flat) for b in infos if b.kind == "circulant"),
        blocks=infos,
    )
    log.debug("n=%d branch=%s kappa=%.4g", n, plan.branch, report.spectral.kappa)
    return V, report
