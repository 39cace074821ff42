"""Random group-wise linear acyclic models and samples drawn from them.

A model has a causal order over groups, a block for every (later, earlier)
pair of groups in that order, and per group an invertible mixing matrix that
turns independent non-Gaussian sources into dependent within-group errors.
Sources are ``sign(u) |u|**q`` for standard normal ``u``, rescaled to unit
variance; ``q < 1`` gives sub-Gaussian and ``q > 1`` super-Gaussian marginals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gamma as gamma_fn, pi, sqrt

import numpy as np

from .data import CausalOrder, GroupedDataMatrix, GroupLayout, block_permute

SCHEMA_VERSION = 1
MAX_MIXER_CONDITION = 1e6
MAX_ATTEMPTS = 100


@dataclass(frozen=True)
class GenConfig:
    group_sizes: tuple[int, ...]
    sparsity: float = 0.1
    coef_range: tuple[float, float] = (0.2, 1.0)
    q_ranges: tuple[tuple[float, float], ...] = ((0.5, 0.8), (1.2, 2.0))
    mixing: float | None = 0.5
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "group_sizes", tuple(int(n) for n in self.group_sizes))
        object.__setattr__(self, "coef_range", tuple(float(c) for c in self.coef_range))
        object.__setattr__(self, "q_ranges", tuple(tuple(float(v) for v in r) for r in self.q_ranges))
        if len(self.group_sizes) < 2 or min(self.group_sizes) < 1:
            raise ValueError("need at least two groups of positive size")
        if not 0 < self.sparsity <= 1:
            raise ValueError("sparsity must lie in (0, 1]")
        lo, hi = self.coef_range
        if not 0 <= lo <= hi:
            raise ValueError("coefficient range must satisfy 0 <= low <= high")
        if not self.q_ranges or any(not 0 < a <= b for a, b in self.q_ranges):
            raise ValueError("exponent ranges must be nonempty positive intervals")

    @classmethod
    def from_dict(cls, d: dict) -> "GenConfig":
        known = {"group_sizes", "sparsity", "coef_range", "q_ranges", "mixing", "seed"}
        unknown = set(d) - known - {"schema_version"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "group_sizes" not in d:
            raise ValueError("config needs 'group_sizes'")
        return cls(**{k: d[k] for k in known if k in d})


@dataclass
class ModelSpec:
    """Ground-truth generative model.

    ``blocks[(target, source)]`` is the ``n_target x n_source`` effect matrix;
    it exists exactly when ``source`` precedes ``target`` in ``order``.
    """

    layout: GroupLayout
    order: CausalOrder
    blocks: dict[tuple[int, int], np.ndarray]
    noise_mixers: dict[int, np.ndarray]
    source_shapes: dict[int, np.ndarray]
    seed: int = 0
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "group_sizes": list(self.layout.group_sizes),
            "order": list(self.order.order),
            "seed": self.seed,
            "blocks": [
                {"target": t, "source": s, "matrix": self.blocks[t, s].tolist()}
                for t, s in sorted(self.blocks)
            ],
            "noise_mixers": [self.noise_mixers[g].tolist() for g in self.layout.group_ids],
            "source_shapes": [self.source_shapes[g].tolist() for g in self.layout.group_ids],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {d.get('schema_version')!r}")
        layout = GroupLayout(tuple(d["group_sizes"]))
        ids = layout.group_ids
        return cls(
            layout=layout,
            order=CausalOrder(tuple(d["order"])),
            blocks={(b["target"], b["source"]): np.array(b["matrix"], dtype=float) for b in d["blocks"]},
            noise_mixers={g: np.array(m, dtype=float) for g, m in zip(ids, d["noise_mixers"])},
            source_shapes={g: np.array(q, dtype=float) for g, q in zip(ids, d["source_shapes"])},
            seed=d.get("seed", 0),
        )

    @classmethod
    def from_json(cls, text: str) -> "ModelSpec":
        return cls.from_dict(json.loads(text))


def _draw_q(rng, ranges, size) -> np.ndarray:
    widths = np.array([b - a for a, b in ranges])
    probs = widths / widths.sum() if widths.sum() > 0 else np.full(len(ranges), 1 / len(ranges))
    which = rng.choice(len(ranges), size=size, p=probs)
    lo = np.array([ranges[w][0] for w in which])
    hi = np.array([ranges[w][1] for w in which])
    return lo + (hi - lo) * rng.random(size)


def _draw_mixer(rng, n: int, mixing: float | None) -> np.ndarray:
    for _ in range(MAX_ATTEMPTS):
        a = rng.standard_normal((n, n))
        if mixing is not None:
            a = np.eye(n) + (mixing / np.sqrt(n)) * a
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        if np.linalg.cond(a) <= MAX_MIXER_CONDITION:
            return a
    raise RuntimeError(f"no mixer with condition number <= {MAX_MIXER_CONDITION:g} in {MAX_ATTEMPTS} draws")


def _draw_block(rng, shape, sparsity, coef_range) -> np.ndarray:
    lo, hi = coef_range
    mask = rng.random(shape) < sparsity
    if not mask.any():
        mask.flat[rng.integers(mask.size)] = True
    values = rng.uniform(lo, hi, size=shape) * rng.choice([-1.0, 1.0], size=shape)
    return np.where(mask, values, 0.0)


def generate_model(cfg: GenConfig) -> ModelSpec:
    """Draw a random model: uniform causal order, sparse blocks, dense mixers."""
    rng = np.random.default_rng(cfg.seed)
    layout = GroupLayout(cfg.group_sizes)
    order = CausalOrder(tuple(int(g) for g in rng.permutation(layout.group_ids)))
    blocks = {}
    for i, target in enumerate(order.order):
        for source in order.order[:i]:
            shape = (layout.size(target), layout.size(source))
            blocks[target, source] = _draw_block(rng, shape, cfg.sparsity, cfg.coef_range)
    mixers = {g: _draw_mixer(rng, layout.size(g), cfg.mixing) for g in layout.group_ids}
    shapes = {g: _draw_q(rng, cfg.q_ranges, layout.size(g)) for g in layout.group_ids}
    return ModelSpec(layout, order, blocks, mixers, shapes, seed=cfg.seed)


def power_source_sd(q) -> np.ndarray:
    """Standard deviation of ``sign(u)|u|**q`` for standard normal ``u``."""
    q = np.atleast_1d(np.asarray(q, dtype=float))
    return np.array([sqrt(2**qq * gamma_fn(qq + 0.5) / sqrt(pi)) for qq in q])


def sample_errors(spec: ModelSpec, m: int, rng) -> dict[int, np.ndarray]:
    out = {}
    for g in spec.layout.group_ids:
        q = spec.source_shapes[g]
        u = rng.standard_normal((q.size, m))
        s = np.sign(u) * np.abs(u) ** q[:, None] / power_source_sd(q)[:, None]
        out[g] = spec.noise_mixers[g] @ s
    return out


def sample_unpermuted(spec: ModelSpec, m: int, rng) -> GroupedDataMatrix:
    """Samples in the model's own group ids, before hiding the order."""
    errors = sample_errors(spec, m, rng)
    x = {}
    for i, target in enumerate(spec.order.order):
        v = errors[target].copy()
        for source in spec.order.order[:i]:
            v += spec.blocks[target, source] @ x[source]
        x[target] = v
    return GroupedDataMatrix.from_blocks([x[g] for g in spec.layout.group_ids])


def sample_data(spec: ModelSpec, m: int, seed=None) -> tuple[GroupedDataMatrix, CausalOrder]:
    """Draw ``m`` samples, block-permute the groups and relabel them ``1..G``.

    Returns the permuted data and the true causal order in the new ids.
    """
    if m < 2:
        raise ValueError("need at least two samples")
    rng = np.random.default_rng(seed)
    data = sample_unpermuted(spec, m, rng)
    perm = [int(p) + 1 for p in rng.permutation(data.n_groups)]
    shuffled = block_permute(data, perm)
    # old id -> new id is its position in the shuffled layout
    new_id = {old: pos for pos, old in enumerate(shuffled.group_ids, start=1)}
    truth = CausalOrder(tuple(new_id[g] for g in spec.order.order))
    return shuffled.relabel(), truth
