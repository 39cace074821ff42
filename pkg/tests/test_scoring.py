import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from grouporder.data import GroupedDataMatrix, Method, block_permute
from grouporder.errors import NoEffectError
from grouporder.scoring import (
    PairRatio,
    leave_one_in_target,
    pairwise_measure,
    pairwise_ratio,
    pairwise_ratios,
    score,
    score_gdl,
    score_pairwise,
    score_trace,
    trace_delta,
    trace_delta_from_estimates,
    trace_ratio_term,
)

from helpers import laplace_pair, model_draw


def noise_free_pair(seed=0, m=400):
    r = np.random.default_rng(seed)
    x = r.laplace(size=(2, m))
    y = np.array([[0.7, -0.5]]) @ x
    return GroupedDataMatrix.from_blocks([x, y])


@pytest.mark.parametrize("method", [Method.GDL_NLCORR, Method.GDL_HSIC])
def test_gdl_noise_free_picks_cause(method):
    s = score_gdl(noise_free_pair(), method)
    assert s.chosen == 1
    assert s.scores[1] == 0.0


def test_gdl_scores_nonnegative(rng):
    d = GroupedDataMatrix.from_blocks([rng.laplace(size=(2, 300)) for _ in range(3)])
    for method in (Method.GDL_NLCORR, Method.GDL_HSIC):
        s = score_gdl(d, method)
        assert all(v >= 0 and np.isfinite(v) for v in s.scores.values())


def test_gdl_symmetric_null_is_exchangeable():
    first = 0
    for seed in range(200):
        r = np.random.default_rng([seed, 5])
        d = GroupedDataMatrix.from_blocks([r.laplace(size=(2, 200)), r.laplace(size=(2, 200))])
        first += score_gdl(d, Method.GDL_NLCORR).chosen == 1
    assert 0.4 <= first / 200 <= 0.6


def test_pairwise_ratio_examples(rng):
    x, y = rng.laplace(size=300), rng.laplace(size=300)
    assert pairwise_ratio(x, x) == 0.0
    assert pairwise_ratio(y, x) == -pairwise_ratio(x, y)


def test_pairwise_ratio_sign_law():
    hits = sum(pairwise_ratio(*laplace_pair(seed)) > 0 for seed in range(100))
    assert hits >= 95


finite = st.floats(-50, 50, allow_nan=False)


@settings(max_examples=50)
@given(arrays(float, 30, elements=finite), arrays(float, 30, elements=finite))
def test_pairwise_ratio_antisymmetric(x, y):
    if x.std() < 1e-3 or y.std() < 1e-3:
        return
    assert pairwise_ratio(x, y) == -pairwise_ratio(y, x)
    assert pairwise_ratio(x, y, kurtosis_sign=False) == -pairwise_ratio(y, x, kurtosis_sign=False)


def test_leave_one_in_single_regressor(rng):
    x = rng.laplace(size=(1, 100))
    y = rng.laplace(size=(2, 100))
    d = GroupedDataMatrix.from_blocks([x, y])
    np.testing.assert_array_equal(leave_one_in_target(d, 1, 2, 0, 1), y[1])


def test_leave_one_in_noise_free(rng):
    x = rng.laplace(size=(3, 100))
    b = np.array([[0.5, -1.0, 2.0]])
    d = GroupedDataMatrix.from_blocks([x, b @ x])
    for k in range(3):
        z = leave_one_in_target(d, 1, 2, k, 0)
        np.testing.assert_allclose(z, b[0, k] * x[k], atol=1e-8)


def test_vectorised_targets_match_literal(rng):
    x = rng.laplace(size=(3, 200))
    y = rng.normal(size=(2, 3)) @ x + rng.laplace(size=(2, 200))
    d = GroupedDataMatrix.from_blocks([x, y])
    got = {(p.k, p.l): p.R for p in pairwise_ratios(d, 1)}
    for k in range(3):
        for l in range(2):
            ref = pairwise_ratio(x[k], leave_one_in_target(d, 1, 2, k, l))
            assert got[k, l] == pytest.approx(ref, abs=1e-10)


def test_pairwise_measure_examples():
    assert pairwise_measure([PairRatio(0, 2, 0, 0.3), PairRatio(0, 2, 1, 0.1)], 1, 2) == 0.0
    assert pairwise_measure([PairRatio(0, 2, 0, -0.2)], 1, 1) == pytest.approx(0.04, abs=1e-10)


def test_naive_pairwise_uses_raw_targets(rng):
    x = rng.laplace(size=(2, 300))
    y = rng.laplace(size=(1, 300)) + x[:1]
    d = GroupedDataMatrix.from_blocks([x, y])
    naive = {(p.k, p.l): p.R for p in pairwise_ratios(d, 1, naive=True)}
    assert naive[1, 0] == pytest.approx(pairwise_ratio(x[1], y[0]), abs=1e-12)


def test_trace_injected_matrices():
    d = trace_delta_from_estimates([[1.0, 1.0], [0.0, 1.0]], np.diag([1.0, 2.0]))
    assert d == pytest.approx(np.log(2.5) - 2 * np.log(1.5), abs=1e-10)
    assert round(d, 4) == 0.1054


def test_trace_orthogonal_b(rng):
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    a = rng.normal(size=(3, 3))
    assert trace_delta_from_estimates(q, a @ a.T + np.eye(3)) == pytest.approx(0.0, abs=1e-10)


def test_trace_whitened_input(rng):
    x = rng.normal(size=(3, 500))
    x -= x.mean(axis=1, keepdims=True)
    w = np.linalg.cholesky(np.cov(x))
    x = np.linalg.solve(w, x)
    y = rng.normal(size=(2, 3)) @ x + 0.1 * rng.normal(size=(2, 500))
    assert trace_delta(x, y) == pytest.approx(0.0, abs=1e-10)


def test_trace_no_effect():
    with pytest.raises(NoEffectError):
        trace_delta_from_estimates(np.zeros((2, 2)), np.eye(2))


def test_trace_ratio_guard():
    assert trace_ratio_term(0.2, 0.1) == pytest.approx(4.0)
    assert trace_ratio_term(1.0, 0.0) == 1e12
    assert trace_ratio_term(1e-14, 0.0) == pytest.approx(1e-4)


def test_trace_two_groups_picks_smaller_delta(rng):
    x = rng.normal(size=(4, 2000)) * np.array([[3.0], [1.0], [0.3], [0.1]])
    y = rng.normal(size=(4, 4)) @ x + 0.1 * rng.normal(size=(4, 2000))
    d = GroupedDataMatrix.from_blocks([x, y])
    s = score_trace(d)
    d12, d21 = trace_delta(x, y), trace_delta(y, x)
    assert s.chosen == (1 if abs(d12) < abs(d21) else 2)


def test_trace_independent_groups_raise(fixtures):
    from grouporder.cli import load_grouped, parse_group_spec

    spec = parse_group_spec((fixtures / "no_effect.groups").read_text())
    d = load_grouped(fixtures / "no_effect.csv", spec)
    with pytest.raises(NoEffectError):
        score_trace(d)


@pytest.mark.parametrize("method", list(Method))
def test_scores_equivariant_under_block_permutation(method):
    _, d, _ = model_draw([3, 2, 3], 0.5, 400, seed=3)
    base = score(d, method).scores
    perm = [3, 1, 2]
    moved = score(block_permute(d, perm), method).scores
    for g in d.group_ids:
        assert moved[g] == pytest.approx(base[g], rel=1e-6, abs=1e-9)


@pytest.mark.slow
def test_pairwise_finds_exogenous_group():
    hits = 0
    for seed in range(50):
        _, d, truth = model_draw([6] * 5, 0.1, 1000, seed)
        hits += score_pairwise(d).chosen == truth.order[0]
    assert hits >= 40


@pytest.mark.slow
def test_trace_beats_chance():
    hits = 0
    for seed in range(50):
        _, d, truth = model_draw([12] * 5, 0.1, 1000, seed)
        hits += score_trace(d).chosen == truth.order[0]
    assert hits >= 20
