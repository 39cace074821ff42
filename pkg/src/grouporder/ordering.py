"""Iterative estimation of a causal order among groups.

Each round scores every remaining group, appends the most exogenous one to
the order and replaces the remaining groups by their residuals after
regressing them on it. Scores may be pooled over several datasets (random
variable subsets of each group, or separate datasets sharing one causal
order) by summing them per group.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .data import CausalOrder, ExogeneityScores, GroupedDataMatrix, GroupLayout, Method
from .errors import GroupOrderError, LayoutError, OrderingError
from .numstats import cv_select_lambda, regress
from .scoring import score

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OrderingOptions:
    method: Method = Method.PAIRWISE
    lam: float = 0.0
    cv_lambda: bool = False
    subgroup_size: int | None = None
    n_subsets: int | None = None
    seed: int = 0
    cv_folds: int = 10

    def __post_init__(self):
        object.__setattr__(self, "method", Method.parse(self.method))
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        if self.subgroup_size is not None and self.subgroup_size < 1:
            raise ValueError("subgroup_size must be positive")
        if self.n_subsets is not None and self.n_subsets < 1:
            raise ValueError("n_subsets must be >= 1")

    def lambda_rule(self):
        """Ridge parameter (or rule mapping a regressor block to one)."""
        if not self.cv_lambda:
            return self.lam
        folds, seed = self.cv_folds, self.seed

        def rule(xj: np.ndarray) -> float:
            return cv_select_lambda(xj, folds=min(folds, xj.shape[1]), seed=seed)

        return rule


@dataclass
class OrderingTrace:
    rounds: list[ExogeneityScores] = field(default_factory=list)
    order: CausalOrder | None = None


def regress_out(data: GroupedDataMatrix, j: int, lam=0.0) -> GroupedDataMatrix:
    """Residuals of every group except ``j`` after regressing it on group ``j``.

    Group ids and relative block order of the remaining groups are kept.
    ``lam`` is a ridge parameter or a callable choosing one from ``x_j``.
    """
    xj = data.group(j)
    lam_j = float(lam(xj)) if callable(lam) else float(lam)
    ids = [i for i in data.group_ids if i != j]
    if not ids:
        raise LayoutError("cannot regress out the only group")
    blocks = [regress(data.group(i), xj, lam_j).residuals for i in ids]
    return GroupedDataMatrix.from_blocks(blocks, ids)


def draw_subgroups(data: GroupedDataMatrix, subgroup_size: int, n_sets: int, seed=None) -> list[GroupedDataMatrix]:
    """``n_sets`` datasets keeping ``subgroup_size`` random variables per group.

    Variables are drawn without replacement within a group, independently
    across groups and datasets; selected rows keep their original order.
    """
    sizes = data.layout.group_sizes
    if subgroup_size > min(sizes):
        raise LayoutError(f"subgroup size {subgroup_size} exceeds smallest group size {min(sizes)}")
    if subgroup_size < 1 or n_sets < 1:
        raise ValueError("subgroup size and number of sets must be positive")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_sets):
        blocks = []
        for g, n_g in zip(data.group_ids, sizes):
            keep = np.sort(rng.choice(n_g, size=subgroup_size, replace=False))
            blocks.append(data.group(g)[keep])
        out.append(GroupedDataMatrix.from_blocks(blocks, data.group_ids))
    return out


def mean_aggregate(data: GroupedDataMatrix) -> GroupedDataMatrix:
    """Replace each group by the per-sample mean of its variables."""
    values = np.vstack([data.group(g).mean(axis=0) for g in data.group_ids])
    return GroupedDataMatrix(values, GroupLayout((1,) * data.n_groups, data.group_ids))


def pooled_scores(datasets: Sequence[GroupedDataMatrix], opts: OrderingOptions) -> ExogeneityScores:
    """Sum per-group scores over datasets sharing the same group ids."""
    if not datasets:
        raise ValueError("no datasets to pool")
    ids = sorted(datasets[0].group_ids)
    for d in datasets[1:]:
        if sorted(d.group_ids) != ids:
            raise LayoutError(f"datasets disagree on groups: {ids} vs {sorted(d.group_ids)}")
    rule = opts.lambda_rule()
    total = dict.fromkeys(ids, 0.0)
    for d in datasets:
        s = score(d, opts.method, rule)
        for g in ids:
            total[g] += s.scores[g]
    return ExogeneityScores(opts.method, total)


def _round_scores(datasets: list[GroupedDataMatrix], opts: OrderingOptions, rng) -> ExogeneityScores:
    if opts.subgroup_size is None and opts.n_subsets is None:
        return pooled_scores(datasets, opts)
    size = opts.subgroup_size or min(min(d.layout.group_sizes) for d in datasets)
    n_sets = opts.n_subsets or 1
    subsets = []
    for d in datasets:
        subsets.extend(draw_subgroups(d, size, n_sets, rng))
    return pooled_scores(subsets, opts)


def estimate_order(data, opts: OrderingOptions | None = None) -> OrderingTrace:
    """Estimate the causal order of the groups in ``data``.

    ``data`` is one :class:`GroupedDataMatrix` or a sequence of them sharing
    group ids (scores are then pooled across datasets and each dataset is
    regressed separately). Subgroup subsets, if requested, are redrawn in
    every round; residuals are always computed on the full groups.
    """
    opts = opts or OrderingOptions()
    datasets = [data] if isinstance(data, GroupedDataMatrix) else list(data)
    if not datasets:
        raise ValueError("no data")
    ids = sorted(datasets[0].group_ids)
    if len(ids) < 2:
        raise LayoutError("at least two groups are required")
    for d in datasets[1:]:
        if sorted(d.group_ids) != ids:
            raise LayoutError("datasets disagree on groups")
    rng = np.random.default_rng(opts.seed)
    rule = opts.lambda_rule()
    trace = OrderingTrace()
    order = []
    for it in range(1, len(ids)):
        try:
            s = _round_scores(datasets, opts, rng)
            order.append(s.chosen)
            trace.rounds.append(s)
            if it < len(ids) - 1:
                datasets = [regress_out(d, s.chosen, rule) for d in datasets]
        except GroupOrderError as exc:
            raise OrderingError(it, exc) from exc
        except (np.linalg.LinAlgError, FloatingPointError) as exc:
            raise OrderingError(it, exc) from exc
        log.debug("round %d: chose group %d from %s", it, s.chosen, s.scores)
    order.extend(g for g in ids if g not in order)
    trace.order = CausalOrder(order)
    return trace

