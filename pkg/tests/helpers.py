"""Shared Monte-Carlo fixtures for the test suite."""

import numpy as np

from grouporder.synthgen import GenConfig, generate_model, sample_data


def model_draw(group_sizes, sparsity, m, seed, **kw):
    """One generated model sampled at ``m``; returns (model, data, truth)."""
    model = generate_model(GenConfig(tuple(group_sizes), sparsity=sparsity, seed=seed, **kw))
    data, truth = sample_data(model, m, seed=[seed, 7])
    return model, data, truth


def brute_force_order_error(est, truth):
    """Pair enumeration: fraction of pairs ordered differently."""
    pe = {g: i for i, g in enumerate(est)}
    pt = {g: i for i, g in enumerate(truth)}
    ids = list(truth)
    bad = total = 0
    for a in range(len(ids)):
        for b in range(a + 1, len(ids)):
            x, y = ids[a], ids[b]
            total += 1
            bad += (pe[x] < pe[y]) != (pt[x] < pt[y])
    return bad / total if total else 0.0


def laplace_pair(seed, m=5000):
    rng = np.random.default_rng(seed)
    x = rng.laplace(size=m)
    return x, 0.8 * x + 0.6 * rng.laplace(size=m)
