"""Monte-Carlo benchmark of ordering methods on random models.

Every trial draws a model, samples it at each configured sample size and runs
every method, scoring the estimate with the pairwise order error. Random
streams are keyed by ``(seed, trial)`` for the model, ``(seed, trial,
size index)`` for the data and additionally by the method label for the
method, so results do not depend on scheduling or on which other methods are
configured.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .data import CausalOrder, GroupedDataMatrix, Method
from .errors import LayoutError
from .ordering import OrderingOptions, estimate_order, mean_aggregate
from .synthgen import GenConfig, generate_model, sample_data

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
GUESS_ERROR = 0.5
CSV_COLUMNS = ("method", "sample_size", "subgroup_size", "error_rate", "trials", "seconds")


def pairwise_order_error(estimated, truth) -> float:
    """Fraction of group pairs whose relative order differs (normalised Kendall tau)."""
    est = estimated.order if isinstance(estimated, CausalOrder) else tuple(estimated)
    tru = truth.order if isinstance(truth, CausalOrder) else tuple(truth)
    if sorted(est) != sorted(tru) or len(set(tru)) != len(tru):
        raise LayoutError(f"orders {est} and {tru} are not over the same groups")
    n = len(tru)
    if n < 2:
        return 0.0
    pos = {g: i for i, g in enumerate(est)}
    seq = np.array([pos[g] for g in tru])
    inversions = int(np.sum(seq[:, None] > seq[None, :], where=np.triu(np.ones((n, n), bool), 1)))
    return inversions / (n * (n - 1) / 2)


@dataclass(frozen=True)
class MethodSpec:
    """One benchmarked method.

    ``aggregate="mean"`` replaces every group by its mean first.
    ``estimator`` overrides ordering entirely; it is called as
    ``estimator(data, truth, seed)`` and must return a causal order.
    """

    label: str
    options: OrderingOptions = field(default_factory=OrderingOptions)
    aggregate: str | None = None
    estimator: Callable | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "MethodSpec":
        opts = OrderingOptions(
            method=Method.parse(d.get("method", "pairwise")),
            lam=float(d.get("lambda", 0.0)),
            cv_lambda=bool(d.get("cv_lambda", False)),
            subgroup_size=d.get("subgroup_size"),
            n_subsets=d.get("subsets"),
        )
        agg = d.get("aggregate")
        if agg not in (None, "mean"):
            raise ValueError(f"unknown aggregate {agg!r}")
        return cls(label=str(d.get("label", opts.method.value)), options=opts, aggregate=agg)

    def to_dict(self) -> dict:
        o = self.options
        return {
            "label": self.label,
            "method": o.method.value,
            "lambda": o.lam,
            "cv_lambda": o.cv_lambda,
            "subgroup_size": o.subgroup_size,
            "subsets": o.n_subsets,
            "aggregate": self.aggregate,
        }


@dataclass(frozen=True)
class BenchConfig:
    family: GenConfig
    sample_sizes: tuple[int, ...]
    trials: int
    methods: tuple[MethodSpec, ...]
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sample_sizes", tuple(int(m) for m in self.sample_sizes))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.sample_sizes or min(self.sample_sizes) < 2:
            raise ValueError("sample sizes must be >= 2")
        if not self.methods:
            raise ValueError("no methods configured")
        labels = [m.label for m in self.methods]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate method labels in {labels}")

    @classmethod
    def from_dict(cls, d: dict) -> "BenchConfig":
        if d.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {d.get('schema_version')!r}")
        for key in ("family", "sample_sizes", "trials", "methods"):
            if key not in d:
                raise ValueError(f"bench config needs {key!r}")
        return cls(
            family=GenConfig.from_dict(d["family"]),
            sample_sizes=tuple(d["sample_sizes"]),
            trials=int(d["trials"]),
            methods=tuple(MethodSpec.from_dict(m) for m in d["methods"]),
            seed=int(d.get("seed", 0)),
        )


@dataclass
class BenchCell:
    method: str
    sample_size: int
    error_rate: float
    trials: int
    seconds: float
    failures: int = 0
    subgroup_size: int | None = None


@dataclass
class BenchReport:
    cells: list[BenchCell]
    records: list[dict] = field(default_factory=list)
    guess_error: float = GUESS_ERROR

    def cell(self, method: str, sample_size: int) -> BenchCell:
        for c in self.cells:
            if c.method == method and c.sample_size == sample_size:
                return c
        raise KeyError((method, sample_size))

    def to_csv(self, timing: bool = True) -> str:
        """CSV text; with ``timing=False`` the seconds column is left empty."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for c in self.cells:
            w.writerow([
                c.method,
                c.sample_size,
                "" if c.subgroup_size is None else c.subgroup_size,
                repr(c.error_rate),
                c.trials,
                f"{c.seconds:.3f}" if timing else "",
            ])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema_version": SCHEMA_VERSION,
                "guess_error": self.guess_error,
                "cells": [vars(c) for c in self.cells],
                "trials": self.records,
            },
            indent=2,
        )


def _stream(*keys: int) -> int:
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


def _label_key(label: str) -> int:
    return zlib.crc32(label.encode("utf-8"))


def run_method(spec: MethodSpec, data: GroupedDataMatrix, truth: CausalOrder, seed: int) -> CausalOrder:
    if spec.estimator is not None:
        return CausalOrder(tuple(spec.estimator(data, truth, seed)))
    if spec.aggregate == "mean":
        data = mean_aggregate(data)
    return estimate_order(data, replace(spec.options, seed=seed)).order


def _run_trial(cfg: BenchConfig, trial: int) -> list[dict]:
    model = generate_model(replace(cfg.family, seed=_stream(cfg.seed, trial)))
    out = []
    for si, m in enumerate(cfg.sample_sizes):
        data, truth = sample_data(model, m, seed=_stream(cfg.seed, trial, si))
        for spec in cfg.methods:
            seed = _stream(cfg.seed, trial, si, _label_key(spec.label))
            t0 = time.perf_counter()
            rec = {"trial": trial, "method": spec.label, "sample_size": m, "truth": list(truth.order)}
            try:
                est = run_method(spec, data, truth, seed)
                rec.update(estimate=list(est.order), error=pairwise_order_error(est, truth), failed=False)
            except Exception as exc:  # a failed trial counts as a guess
                log.warning("trial %d, method %s, m=%d failed: %s", trial, spec.label, m, exc)
                rec.update(estimate=None, error=GUESS_ERROR, failed=True, diagnostic=str(exc))
            rec["seconds"] = time.perf_counter() - t0
            out.append(rec)
    return out


def _aggregate(cfg: BenchConfig, records: list[dict], subgroup_size=None) -> list[BenchCell]:
    cells = []
    for spec in cfg.methods:
        for m in cfg.sample_sizes:
            rs = [r for r in records if r["method"] == spec.label and r["sample_size"] == m]
            cells.append(BenchCell(
                method=spec.label,
                sample_size=m,
                error_rate=float(np.mean([r["error"] for r in rs])),
                trials=len(rs),
                seconds=float(sum(r["seconds"] for r in rs)),
                failures=sum(r["failed"] for r in rs),
                subgroup_size=subgroup_size,
            ))
    return cells


def run_bench(cfg: BenchConfig, n_jobs: int = 1, subgroup_size: int | None = None) -> BenchReport:
    """Run every (trial, sample size, method) cell and average the errors."""
    trials = range(cfg.trials)
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            chunks = list(pool.map(_run_trial, [cfg] * cfg.trials, trials))
    else:
        chunks = [_run_trial(cfg, t) for t in trials]
    records = [r for chunk in chunks for r in chunk]
    return BenchReport(_aggregate(cfg, records, subgroup_size), records)


def subgroup_size_sweep(cfg: BenchConfig, sizes: Sequence[int], n_jobs: int = 1) -> dict[int, BenchReport]:
    """Benchmark every method on a single random subset of each group per size.

    Mean-aggregated and custom-estimator methods have no groups to subset
    and are run unchanged.
    """
    sizes = [int(s) for s in sizes]
    if not sizes:
        raise ValueError("no subgroup sizes given")
    smallest = min(cfg.family.group_sizes)
    if min(sizes) < 1 or max(sizes) > smallest:
        raise ValueError(f"subgroup sizes must lie in 1..{smallest}")
    out = {}
    for size in sizes:
        methods = tuple(
            m if m.aggregate or m.estimator else replace(m, options=replace(m.options, subgroup_size=size, n_subsets=1))
            for m in cfg.methods
        )
        out[size] = run_bench(replace(cfg, methods=methods), n_jobs=n_jobs, subgroup_size=size)
    return out


def merge_reports(reports: Sequence[BenchReport]) -> BenchReport:
    cells = [c for r in reports for c in r.cells]
    records = [rec for r in reports for rec in r.records]
    return BenchReport(cells, records)

