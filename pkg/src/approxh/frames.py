"""Random n×N frames: harvesting near-copies of a sign matrix and searching for
well-conditioned square submatrices.

Columns of a frame ``A`` are split round-robin into ``n`` classes
(``k -> k mod n``). Column ``k`` in class ``j`` *matches* when
``‖A_k - a V_j‖_∞ <= nu``; taking one match per class gives a square submatrix
that is a small perturbation of ``a V`` and therefore inherits its conditioning.

Class membership of an index does not depend on ``N``, so running the same
procedures on prefixes of one wide frame gives nested families. The cumulative
sweep relies on this.
"""

from __future__ import annotations

import csv
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from itertools import combinations, islice
from typing import Iterable, Sequence

import numpy as np

from .config import RunConfig
from .errors import ApproxHError, BudgetExceeded, InvalidArgument
from .spectral import batch_condition_numbers

log = logging.getLogger(__name__)

DISTRIBUTIONS = ("rademacher", "gaussian", "uniform", "two-point")
_ALIASES = {"uniform-symmetric": "uniform", "two_point": "two-point"}
# per-batch SVD stack size; keeps memory flat for long searches
_CHUNK = 4096


def _distribution(name: str) -> str:
    name = _ALIASES.get(name, name)
    if name not in DISTRIBUTIONS:
        raise InvalidArgument(f"unknown distribution {name!r}; choose from {', '.join(DISTRIBUTIONS)}")
    return name


@dataclass(frozen=True)
class FrameEnsemble:
    """I.i.d. ``n × N`` frame with entries from a symmetric distribution.

    ``rademacher``, ``gaussian`` and ``uniform`` (on ``[-√3, √3]``) have unit
    variance; ``two-point`` takes the values ``±a``.
    """

    n: int
    N: int
    distribution: str = "rademacher"
    seed: int = 0
    a: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "distribution", _distribution(self.distribution))
        if self.n < 1 or self.N < self.n:
            raise InvalidArgument(f"need 1 <= n <= N, got n={self.n}, N={self.N}")
        if not self.a > 0:
            raise InvalidArgument("a must be positive")


def sample_frame(ens: FrameEnsemble) -> np.ndarray:
    rng = np.random.default_rng(ens.seed)
    shape = (ens.n, ens.N)
    if ens.distribution == "gaussian":
        return rng.standard_normal(shape)
    if ens.distribution == "uniform":
        r = math.sqrt(3.0)
        return rng.uniform(-r, r, shape)
    scale = 1.0 if ens.distribution == "rademacher" else ens.a
    return scale * (2.0 * rng.integers(0, 2, shape) - 1.0)


@dataclass
class MatchReport:
    a: float
    nu: float
    partition: list[np.ndarray]
    matches: list[np.ndarray]

    @property
    def counts(self) -> list[int]:
        return [len(m) for m in self.matches]

    @property
    def M_min(self) -> int:
        return min(self.counts)


def round_robin(N: int, n: int) -> list[np.ndarray]:
    return [np.arange(j, N, n) for j in range(n)]


def match_columns(A, V, a: float = 1.0, nu: float = 0.125) -> MatchReport:
    A = np.asarray(A, dtype=float)
    V = np.asarray(V, dtype=float)
    n = V.shape[0]
    if A.ndim != 2 or V.shape != (n, n) or A.shape[0] != n:
        raise InvalidArgument(f"frame of shape {A.shape} does not fit a sign matrix of shape {V.shape}")
    if A.shape[1] < n:
        raise InvalidArgument("frame needs at least n columns")
    if not (a > 0 and nu >= 0):
        raise InvalidArgument("need a > 0 and nu >= 0")
    parts = round_robin(A.shape[1], n)
    matches = []
    for j, idx in enumerate(parts):
        dist = np.abs(A[:, idx] - a * V[:, j : j + 1]).max(axis=0)
        matches.append(idx[dist <= nu])
    return MatchReport(a, nu, parts, matches)


def harvest_bases(A, V, a: float = 1.0, nu: float = 0.125, max_bases: int = 1000) -> list[tuple[tuple[int, ...], float]]:
    """Disjoint transversals built from the first matches of every class.

    Basis ``b`` takes the ``b``-th match (in ascending index order) from each
    class, listed in class order so that ``A[:, I] ≈ a V``.
    """
    rep = match_columns(A, V, a, nu)
    count = min(rep.M_min, max_bases)
    if count == 0:
        return []
    A = np.asarray(A, dtype=float)
    index_sets = np.stack([m[:count] for m in rep.matches], axis=1)
    kappas = batch_condition_numbers(A.T[index_sets].transpose(0, 2, 1))
    return [(tuple(int(i) for i in I), float(k)) for I, k in zip(index_sets, kappas)]


def _sample_index_sets(rng: np.random.Generator, N: int, n: int, count: int) -> np.ndarray:
    """``count`` sorted index sets of size ``n`` drawn uniformly without replacement."""
    out = np.empty((count, n), dtype=np.int64)
    filled = 0
    while filled < count:
        need = count - filled
        draw = np.sort(rng.integers(0, N, (need, n)), axis=1)
        ok = np.all(np.diff(draw, axis=1) > 0, axis=1)
        good = draw[ok]
        out[filled : filled + len(good)] = good
        filled += len(good)
    return out


def _min_over(A: np.ndarray, sets: np.ndarray, best: tuple[float, tuple[int, ...] | None]):
    kappas = batch_condition_numbers(A.T[sets].transpose(0, 2, 1))
    i = int(np.argmin(kappas))
    if best[1] is None or kappas[i] < best[0]:
        best = (float(kappas[i]), tuple(int(x) for x in sets[i]))
    return best


def best_kappa(
    A,
    strategy: str = "random",
    samples: int = 2000,
    rng: np.random.Generator | None = None,
    budget: int = 10_000_000,
) -> tuple[float, tuple[int, ...]]:
    """Smallest condition number over ``n × n`` column submatrices of ``A``.

    ``exhaustive`` visits all ``C(N, n)`` index sets and refuses when that
    exceeds ``budget``; ``random`` draws ``samples`` sets, each without
    replacement. Returns the minimum and its witness.
    """
    A = np.asarray(A, dtype=float)
    n, N = A.shape
    if N < n:
        raise InvalidArgument("frame needs at least n columns")
    best: tuple[float, tuple[int, ...] | None] = (math.inf, None)
    if strategy == "exhaustive":
        total = math.comb(N, n)
        if total > budget:
            raise BudgetExceeded(f"C({N}, {n}) = {total} index sets exceed the budget of {budget}")
        it = combinations(range(N), n)
        while chunk := list(islice(it, _CHUNK)):
            best = _min_over(A, np.array(chunk), best)
    elif strategy == "random":
        if samples < 1:
            raise InvalidArgument("random search needs at least one sample")
        rng = rng if rng is not None else np.random.default_rng()
        for start in range(0, samples, _CHUNK):
            sets = _sample_index_sets(rng, N, n, min(_CHUNK, samples - start))
            best = _min_over(A, sets, best)
    else:
        raise InvalidArgument(f"unknown strategy {strategy!r}")
    return best  # type: ignore[return-value]


@dataclass
class SweepRecord:
    n: int
    N: int
    distribution: str
    seed: int
    strategy: str
    best_kappa: float
    bases_found: int
    kappa_threshold: float
    wall_time_ms: float
    error: str | None = field(default=None, compare=False)
    # harvested bases, kept in memory only
    bases: list = field(default_factory=list, repr=False, compare=False)

    def row(self) -> list:
        # repr gives the shortest round-trip decimal for floats
        return [repr(v) if isinstance(v, float) else v for v in (getattr(self, f) for f in CSV_FIELDS)]


CSV_FIELDS = ("n", "N", "distribution", "seed", "strategy", "best_kappa", "bases_found", "kappa_threshold", "wall_time_ms")


def write_sweep_csv(records: Iterable[SweepRecord], dest) -> None:
    """Write records to a path or an open text stream."""
    if hasattr(dest, "write"):
        w = csv.writer(dest, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        w.writerows(r.row() for r in records)
        return
    with open(dest, "w", newline="") as fh:
        write_sweep_csv(records, fh)


def read_sweep_csv(path) -> list[SweepRecord]:
    types = {f.name: f.type for f in fields(SweepRecord)}
    conv = {"int": int, "float": float, "str": str}
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(SweepRecord(**{k: conv[types[k]](v) for k, v in row.items()}))
    return out


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("APPROXH_THREADS", "1")))
    except ValueError:
        return 1


def _strategy_for(n: int, N: int, config: RunConfig) -> str:
    return "exhaustive" if math.comb(N, n) <= config.exhaustive_budget else "random"


def _run_trial(n: int, N: int, dist: str, seed: int, V, threshold: float, config: RunConfig) -> SweepRecord:
    t0 = time.perf_counter()
    strategy = _strategy_for(n, N, config)
    try:
        A = sample_frame(FrameEnsemble(n, N, dist, seed, config.a))
        bases = harvest_bases(A, V, config.a, config.nu, config.max_bases)
        kappa, _ = best_kappa(
            A, strategy, config.random_samples, np.random.default_rng([seed, 1]), config.exhaustive_budget
        )
        error = None
    except ApproxHError as exc:
        bases, kappa, error = [], math.inf, exc.code
        log.warning("sweep cell n=%d N=%d seed=%d failed: %s", n, N, seed, exc)
    found = sum(1 for _, k in bases if k <= threshold)
    ms = (time.perf_counter() - t0) * 1e3
    return SweepRecord(n, N, dist, seed, strategy if error is None else f"error:{error}", kappa, found, threshold, ms, error, bases)


def trial_seed(master: int, cell: int, trial: int) -> int:
    """64-bit seed of one sweep trial, independent of scheduling."""
    ss = np.random.SeedSequence([master, cell, trial])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def phase_sweep(
    grid: Sequence[tuple[int, int, str, int]],
    kappa_threshold: float,
    config: RunConfig | None = None,
    out=None,
) -> list[SweepRecord]:
    """One record per (cell, trial). Failures are recorded and the sweep goes on.

    Each trial uses ``V = assemble(n)`` under ``config`` as the template for
    harvesting. Work is spread over ``APPROXH_THREADS`` threads; records come
    back in grid order regardless.
    """
    from .assembly import assemble

    config = config or RunConfig()
    templates = {}
    jobs = []
    for cell, (n, N, dist, trials) in enumerate(grid):
        dist = _distribution(dist)
        if n not in templates:
            templates[n] = assemble(n, config)[0]
        for t in range(trials):
            jobs.append((n, N, dist, trial_seed(config.seed, cell, t)))

    def run(job):
        n, N, dist, seed = job
        return _run_trial(n, N, dist, seed, templates[n], kappa_threshold, config)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        records = list(pool.map(run, jobs))
    if out is not None:
        write_sweep_csv(records, out)
    return records


def cumulative_sweep(
    n: int,
    Ns: Sequence[int],
    seed: int,
    kappa_threshold: float,
    config: RunConfig | None = None,
    distribution: str = "two-point",
    V=None,
) -> list[SweepRecord]:
    """Per-seed sweep over growing prefixes of a single frame.

    The frame is drawn once at ``max(Ns)`` columns. At each prefix width the
    random search adds fresh index sets drawn from the prefix to everything
    searched before, so ``best_kappa`` cannot increase with ``N``. Harvesting
    on a prefix sees a subset of the matches of any longer prefix, so
    ``bases_found`` cannot decrease.
    """
    from .assembly import assemble

    config = config or RunConfig()
    Ns = sorted(Ns)
    if V is None:
        V = assemble(n, config)[0]
    A = sample_frame(FrameEnsemble(n, Ns[-1], distribution, seed, config.a))
    rng = np.random.default_rng([seed, 2])
    best: tuple[float, tuple[int, ...] | None] = (math.inf, None)
    records = []
    for N in Ns:
        t0 = time.perf_counter()
        prefix = A[:, :N]
        for start in range(0, config.random_samples, _CHUNK):
            sets = _sample_index_sets(rng, N, n, min(_CHUNK, config.random_samples - start))
            best = _min_over(prefix, sets, best)
        bases = harvest_bases(prefix, V, config.a, config.nu, config.max_bases)
        found = sum(1 for _, k in bases if k <= kappa_threshold)
        ms = (time.perf_counter() - t0) * 1e3
        records.append(
            SweepRecord(n, N, _distribution(distribution), seed, "cumulative", best[0], found, kappa_threshold, ms, bases=bases)
        )
    return records


def perturbation_kappas(V, delta: float, trials: int, seed: int) -> np.ndarray:
    """Condition numbers of ``V + Y`` for ``trials`` uniform ``[-delta, delta]`` perturbations."""
    V = np.asarray(V, dtype=float)
    rng = np.random.default_rng(seed)
    Y = rng.uniform(-delta, delta, (trials, *V.shape))
    return batch_condition_numbers(V + Y)


__all__ = [
    "CSV_FIELDS",
    "DISTRIBUTIONS",
    "FrameEnsemble",
    "MatchReport",
    "SweepRecord",
    "best_kappa",
    "cumulative_sweep",
    "harvest_bases",
    "match_columns",
    "perturbation_kappas",
    "phase_sweep",
    "read_sweep_csv",
    "round_robin",
    "sample_frame",
    "trial_seed",
    "write_sweep_csv",
]
