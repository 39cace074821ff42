import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from grouporder.bench import (
    CSV_COLUMNS,
    BenchConfig,
    MethodSpec,
    pairwise_order_error,
    run_bench,
    subgroup_size_sweep,
)
from grouporder.data import Method
from grouporder.errors import LayoutError
from grouporder.ordering import OrderingOptions
from grouporder.synthgen import GenConfig

from helpers import brute_force_order_error


def small_cfg(methods, sizes=(100,), trials=2, groups=(2, 2, 2), seed=0):
    return BenchConfig(GenConfig(groups, sparsity=0.5), sizes, trials, tuple(methods), seed)


def test_metric_examples():
    assert pairwise_order_error((1, 2, 3), (1, 2, 3)) == 0.0
    assert pairwise_order_error((3, 2, 1), (1, 2, 3)) == 1.0
    assert pairwise_order_error((2, 1, 3), (1, 2, 3)) == pytest.approx(1 / 3)
    with pytest.raises(LayoutError):
        pairwise_order_error((1, 2), (1, 3))


perm_st = st.integers(2, 7).flatmap(lambda n: st.tuples(st.permutations(range(1, n + 1)), st.permutations(range(1, n + 1))))


@given(perm_st)
def test_metric_symmetric_and_relabel_invariant(pair):
    a, b = pair
    assert pairwise_order_error(a, b) == pairwise_order_error(b, a)
    assert pairwise_order_error(a, b) == brute_force_order_error(a, b)
    relabel = {g: 10 * g + 1 for g in a}
    assert pairwise_order_error([relabel[g] for g in a], [relabel[g] for g in b]) == pairwise_order_error(a, b)


def test_single_trial_two_groups():
    rep = run_bench(small_cfg([MethodSpec("pw")], trials=1, groups=(2, 2)))
    assert len(rep.cells) == 1
    assert rep.cells[0].error_rate in (0.0, 1.0)


def test_oracle_and_anti_oracle():
    oracle = MethodSpec("oracle", estimator=lambda d, truth, s: truth.order)
    anti = MethodSpec("anti", estimator=lambda d, truth, s: truth.order[::-1])
    rep = run_bench(small_cfg([oracle, anti], sizes=(50, 100), trials=3))
    for m in (50, 100):
        assert rep.cell("oracle", m).error_rate == 0.0
        assert rep.cell("anti", m).error_rate == 1.0


def test_random_order_is_a_guess():
    def guess(d, truth, seed):
        return tuple(int(g) for g in np.random.default_rng(seed).permutation(truth.order))

    rep = run_bench(small_cfg([MethodSpec("guess", estimator=guess)], sizes=(20,), trials=500, groups=(1,) * 5))
    assert rep.cells[0].error_rate == pytest.approx(0.5, abs=0.05)


def test_failures_count_as_guess():
    def broken(d, truth, seed):
        raise FloatingPointError("boom")

    rep = run_bench(small_cfg([MethodSpec("broken", estimator=broken)]))
    c = rep.cells[0]
    assert c.error_rate == 0.5 and c.failures == 2
    assert all("boom" in r["diagnostic"] for r in rep.records)


def test_deterministic_and_method_independent():
    pw = MethodSpec("pw")
    gdl = MethodSpec("gdl", OrderingOptions(method=Method.GDL_NLCORR))
    a = run_bench(small_cfg([pw, gdl], trials=3))
    b = run_bench(small_cfg([pw, gdl], trials=3))
    assert a.to_csv(timing=False) == b.to_csv(timing=False)
    # dropping a method does not disturb the others
    c = run_bench(small_cfg([pw], trials=3))
    assert c.cell("pw", 100).error_rate == a.cell("pw", 100).error_rate


def test_parallel_matches_serial():
    cfg = small_cfg([MethodSpec("pw")], trials=4)
    assert run_bench(cfg, n_jobs=2).to_csv(timing=False) == run_bench(cfg).to_csv(timing=False)


def test_csv_and_json_layout():
    rep = run_bench(small_cfg([MethodSpec("pw"), MethodSpec("tr", OrderingOptions(method=Method.TRACE))], sizes=(60, 120)))
    lines = rep.to_csv().strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + 2 * 2
    doc = json.loads(rep.to_json())
    assert doc["schema_version"] == 1 and len(doc["trials"]) == 2 * 2 * 2


def test_config_from_dict():
    cfg = BenchConfig.from_dict({
        "family": {"group_sizes": [2, 2]},
        "sample_sizes": [50],
        "trials": 1,
        "methods": [{"label": "a", "method": "trace", "cv_lambda": True}, {"label": "b", "aggregate": "mean"}],
    })
    assert cfg.methods[0].options.method is Method.TRACE and cfg.methods[0].options.cv_lambda
    with pytest.raises(ValueError):
        BenchConfig.from_dict({"family": {"group_sizes": [2, 2]}, "sample_sizes": [50], "trials": 1,
                               "methods": [{"label": "a"}, {"label": "a"}]})
    with pytest.raises(ValueError):
        BenchConfig.from_dict({"sample_sizes": [50], "trials": 1, "methods": []})


def test_sweep_full_size_matches_plain_bench():
    gdl = MethodSpec("gdl", OrderingOptions(method=Method.GDL_NLCORR))
    cfg = small_cfg([gdl], trials=3, groups=(3, 3, 3))
    sweep = subgroup_size_sweep(cfg, [3, 1])
    plain = run_bench(cfg)
    assert sweep[3].cells[0].error_rate == plain.cells[0].error_rate
    assert sweep[1].cells[0].subgroup_size == 1
    with pytest.raises(ValueError):
        subgroup_size_sweep(cfg, [])
    with pytest.raises(ValueError):
        subgroup_size_sweep(cfg, [4])


@pytest.mark.slow
def test_sweep_smaller_subsets_do_not_help_at_large_m():
    gdl = MethodSpec("gdl", OrderingOptions(method=Method.GDL_NLCORR))
    cfg = BenchConfig(GenConfig((6,) * 5, sparsity=0.1), (1000,), 20, (gdl,), seed=5)
    sweep = subgroup_size_sweep(cfg, [1, 6])
    assert sweep[1].cells[0].error_rate >= sweep[6].cells[0].error_rate - 0.05


def test_sweep_leaves_aggregated_methods_alone():
    mean = MethodSpec("mean", aggregate="mean")
    rep = subgroup_size_sweep(small_cfg([mean], trials=2, groups=(3, 3, 3)), [2])[2]
    assert rep.cells[0].failures == 0
