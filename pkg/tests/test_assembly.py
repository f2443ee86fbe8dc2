import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from approxh.assembly import (
    BlockPlan,
    accept_r,
    assemble,
    build_blocks,
    build_s,
    build_w_top,
    plan_blocks,
    r_norms,
    s_support,
    sample_r,
    walsh4,
)
from approxh.config import RunConfig
from approxh.errors import InvalidArgument, ResampleExhausted
from approxh.hadamard import paley, sylvester
from approxh.numtheory import PrimeQuadruple
from approxh.spectral import singular_extremes

CFG = RunConfig()


def test_walsh4_is_sylvester():
    assert np.array_equal(walsh4(), sylvester(2).entries)
    assert walsh4().tolist() == [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]]


@pytest.mark.parametrize("n", [1, 2, 4, 8, 12, 16, 64, 256])
def test_exact_hadamard_orders(n):
    V, rep = assemble(n)
    assert rep.plan.branch == "exact-hadamard"
    assert rep.spectral.kappa == pytest.approx(1, rel=1e-9)
    if n == 4:
        assert np.array_equal(V, walsh4())


@pytest.mark.parametrize("n, branch", [(102, "even-general"), (100, "even-degenerate"), (101, "odd"), (148, "even-degenerate")])
def test_branches(n, branch):
    V, rep = assemble(n)
    assert rep.plan.branch == branch
    assert V.shape == (n, n) and set(np.unique(V)) <= {-1, 1}
    assert rep.spectral.kappa <= CFG.k_accept


def test_plan_sizes_follow_decomposition():
    plan = plan_blocks(101, CFG)
    assert sum(plan.sizes) == 101
    assert plan.sizes == tuple(sorted(plan.sizes, reverse=True))
    assert plan.kinds.count("hadamard") == 1
    assert plan.q == min(plan.sizes)
    assert plan.top_rows + plan.bottom_rows == 101


def test_small_fallback():
    for n in (3, 5, 6, 7):
        V, rep = assemble(n)
        assert rep.plan.branch == "small-fallback"
        assert set(np.unique(V)) <= {-1, 1} and math.isfinite(rep.spectral.kappa)


def test_fallback_n3_exhaustive_optimum():
    V, rep = assemble(3)
    assert rep.fallback_trials == 2**9
    # brute force over all 512 sign matrices
    from itertools import product

    best = min(np.linalg.cond(np.array(b).reshape(3, 3)) for b in product((1, -1), repeat=9))
    assert rep.spectral.kappa == pytest.approx(best, rel=1e-9)


def test_w_top_with_hadamard_blocks_is_orthogonal():
    # four equal Paley blocks: W_top has orthogonal rows of norm n
    H = paley(11).entries
    q = 12
    plan = BlockPlan(4 * q, "even-degenerate", None, q=q, sizes=(q,) * 4, kinds=("hadamard",) * 4)
    W = build_w_top([H] * 4, plan).astype(int)
    assert np.array_equal(W @ W.T, 4 * q * np.eye(4 * q, dtype=int))
    assert np.array_equal(W[:q, :q], H)


def test_degenerate_plan_has_empty_bottom():
    plan = plan_blocks(148, CFG)
    assert plan.sizes == (37,) * 4
    blocks, _ = build_blocks(plan, CFG, 0)
    assert plan.bottom_rows == 0
    assert build_s(blocks, plan).shape == (0, 148)
    R = sample_r(plan, np.random.default_rng(0))
    assert R.size == 0 and accept_r(build_s(blocks, plan), R, 0.2, CFG.c_sr)
    assert np.array_equal(build_w_top(blocks, plan)[:37, :37], blocks[0])


def test_s_and_r_supports_are_complementary():
    plan = plan_blocks(102, CFG)
    blocks, _ = build_blocks(plan, CFG, 0)
    S = build_s(blocks, plan)
    R = sample_r(plan, np.random.default_rng(0))
    mask = s_support(plan)
    assert np.all((S != 0) == mask)
    assert np.all((R != 0) == ~mask)
    assert set(np.unique(S + R)) <= {-1, 1}


def test_r_mean_is_zero():
    plan = plan_blocks(102, CFG)
    rng = np.random.default_rng(1)
    mask = ~s_support(plan)
    vals = np.concatenate([sample_r(plan, rng)[mask] for _ in range(40)]).astype(float)
    assert vals.size > 10**4
    assert abs(vals.mean()) <= 3 / math.sqrt(vals.size)


def test_accept_r_rejects_large_norm():
    plan = plan_blocks(102, CFG)
    blocks, _ = build_blocks(plan, CFG, 0)
    S = build_s(blocks, plan)
    # every row the same giant row
    R = np.full(S.shape, 10, dtype=np.int64)
    R[s_support(plan)] = 0
    assert r_norms(S, R)[1] > 4 * math.sqrt(102)
    assert not accept_r(S, R, 0.2, CFG.c_sr)
    with pytest.raises(InvalidArgument):
        accept_r(S, R[:-1], 0.2, CFG.c_sr)


def test_accept_r_frequency_n200():
    plan = plan_blocks(202, CFG)
    blocks, _ = build_blocks(plan, CFG, 0)
    S = build_s(blocks, plan)
    rng = np.random.default_rng(5)
    hits = sum(accept_r(S, sample_r(plan, rng), 0.2, CFG.c_sr) for _ in range(100))
    assert hits >= 80


def test_resample_exhausted_is_raised():
    with pytest.raises(ResampleExhausted):
        assemble(102, CFG.with_(c_sr=1e-6))


def test_invalid_order():
    with pytest.raises(InvalidArgument):
        assemble(0)


@settings(max_examples=15)
@given(st.integers(1, 160), st.integers(0, 2**63))
def test_output_is_sign_matrix_and_deterministic(n, seed):
    V1, r1 = assemble(n, CFG, seed=seed)
    V2, r2 = assemble(n, CFG, seed=seed)
    assert np.array_equal(V1, V2) and r1.to_dict() == r2.to_dict()
    assert V1.shape == (n, n) and set(np.unique(V1)) <= {-1, 1}
    lo, hi = singular_extremes(V1)
    assert r1.spectral.s_min == pytest.approx(lo) and r1.spectral.s_max == pytest.approx(hi)


def test_report_records_bounds():
    V, rep = assemble(150)
    d = rep.to_dict()
    assert d["plan"]["branch"] == rep.plan.branch
    W = V.T.astype(float)
    top = W[: rep.plan.top_rows]
    assert rep.w_top_deviation == pytest.approx(np.linalg.norm(top @ top.T - 150 * np.eye(len(top)), 2))
    assert rep.sr_norm <= CFG.c_sr * math.sqrt(CFG.eps_accept) * 150
    assert rep.r_norm <= 4 * math.sqrt(150)


def test_seed_changes_output():
    a, _ = assemble(150, CFG, seed=1)
    b, _ = assemble(150, CFG, seed=2)
    assert not np.array_equal(a, b)


def test_decomposition_is_reported():
    _, rep = assemble(100)
    dec = rep.plan.decomposition
    assert isinstance(dec, PrimeQuadruple) and sum(dec.q) == 100
