"""Grouped data containers, causal orders and exogeneity score records.

Data are stored variables-by-samples: each row is one variable, each column
one observation. Rows of the same group are contiguous. Group ids are
1-based integers; a layout carries the ids of its blocks so that matrices
derived by permutation or by regressing out a group keep referring to the
groups of the original input.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DataError, LayoutError


class Method(str, enum.Enum):
    """Exogenous-group scoring methods."""

    GDL_HSIC = "gdl-hsic"
    GDL_NLCORR = "gdl-nlcorr"
    PAIRWISE = "pairwise"
    NAIVE_PAIRWISE = "naive-pairwise"
    TRACE = "trace"

    @classmethod
    def parse(cls, value: "Method | str") -> "Method":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower().replace("_", "-"))
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown method {value!r}; expected one of {names}") from None


@dataclass(frozen=True)
class GroupLayout:
    """Sizes of the groups in row order, plus the id attached to each block."""

    group_sizes: tuple[int, ...]
    group_ids: tuple[int, ...] = field(default=())

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.group_sizes)
        ids = tuple(int(g) for g in self.group_ids) or tuple(range(1, len(sizes) + 1))
        if len(sizes) < 1 or any(s < 1 for s in sizes):
            raise LayoutError(f"group sizes must be positive, got {sizes}")
        if len(ids) != len(sizes) or len(set(ids)) != len(ids):
            raise LayoutError(f"group ids {ids} do not match {len(sizes)} groups")
        object.__setattr__(self, "group_sizes", sizes)
        object.__setattr__(self, "group_ids", ids)
        offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
        object.__setattr__(self, "_offsets", tuple(int(o) for o in offsets))

    @property
    def n_groups(self) -> int:
        return len(self.group_sizes)

    @property
    def total(self) -> int:
        return self._offsets[-1]

    def position(self, g: int) -> int:
        """0-based block position of group id ``g``."""
        try:
            return self.group_ids.index(int(g))
        except ValueError:
            raise LayoutError(f"unknown group id {g}; layout has {self.group_ids}") from None

    def size(self, g: int) -> int:
        return self.group_sizes[self.position(g)]

    def rows(self, g: int) -> slice:
        p = self.position(g)
        return slice(self._offsets[p], self._offsets[p + 1])

    def global_index(self, g: int, k: int) -> int:
        """Row index of the ``k``-th (0-based) variable of group ``g``."""
        p = self.position(g)
        if not 0 <= k < self.group_sizes[p]:
            raise LayoutError(f"variable index {k} out of range for group {g}")
        return self._offsets[p] + k

    def locate(self, row: int) -> tuple[int, int]:
        """Inverse of :meth:`global_index`: (group id, within-group index)."""
        if not 0 <= row < self.total:
            raise LayoutError(f"row {row} out of range")
        p = int(np.searchsorted(self._offsets, row, side="right")) - 1
        return self.group_ids[p], row - self._offsets[p]


@dataclass(frozen=True)
class GroupedDataMatrix:
    """Immutable observations for all variables, organised by group."""

    values: np.ndarray
    layout: GroupLayout

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim != 2:
            raise DataError(f"data must be two-dimensional, got shape {values.shape}")
        if values.shape[0] != self.layout.total:
            raise DataError(
                f"data has {values.shape[0]} rows but layout expects {self.layout.total}"
            )
        if values.shape[1] < 2:
            raise DataError("at least two observations are required")
        if not np.all(np.isfinite(values)):
            raise DataError("data contains non-finite entries")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_blocks(cls, blocks: Sequence[np.ndarray], group_ids: Sequence[int] = ()):
        blocks = [np.atleast_2d(np.asarray(b, dtype=float)) for b in blocks]
        layout = GroupLayout(tuple(b.shape[0] for b in blocks), tuple(group_ids))
        return cls(np.vstack(blocks), layout)

    @property
    def sample_count(self) -> int:
        return self.values.shape[1]

    @property
    def group_ids(self) -> tuple[int, ...]:
        return self.layout.group_ids

    @property
    def n_groups(self) -> int:
        return self.layout.n_groups

    def group(self, g: int) -> np.ndarray:
        return self.values[self.layout.rows(g)]

    def blocks(self) -> list[np.ndarray]:
        return [self.group(g) for g in self.group_ids]

    def relabel(self, group_ids: Sequence[int] = ()) -> "GroupedDataMatrix":
        """Same values with new block ids (default ``1..G`` in row order)."""
        return GroupedDataMatrix(self.values, GroupLayout(self.layout.group_sizes, tuple(group_ids)))


def extract_group(data: GroupedDataMatrix, g: int) -> np.ndarray:
    """Return the ``n_g x m`` row block of group ``g`` (a read-only view)."""
    return data.group(g)


def _check_permutation(perm: Sequence[int], n: int) -> list[int]:
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(1, n + 1)):
        raise LayoutError(f"{perm} is not a permutation of 1..{n}")
    return perm


def block_permute(data: GroupedDataMatrix, perm: Sequence[int]) -> GroupedDataMatrix:
    """Reorder whole group blocks.

    ``perm`` is positional and 1-based: block ``i`` of the result is block
    ``perm[i]`` of the input. Rows keep their within-group order and group
    ids travel with their blocks.
    """
    perm = _check_permutation(perm, data.n_groups)
    ids = [data.group_ids[p - 1] for p in perm]
    blocks = [data.group(g) for g in ids]
    return GroupedDataMatrix.from_blocks(blocks, ids)


def inverse_permutation(perm: Sequence[int]) -> list[int]:
    perm = _check_permutation(perm, len(perm))
    inv = [0] * len(perm)
    for i, p in enumerate(perm, start=1):
        inv[p - 1] = i
    return inv


@dataclass(frozen=True)
class CausalOrder:
    """A permutation of group ids, most exogenous group first."""

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(g) for g in self.order)
        if len(order) < 1 or len(set(order)) != len(order):
            raise LayoutError(f"causal order {order} repeats a group id")
        object.__setattr__(self, "order", order)

    def __len__(self):
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    def rank(self) -> dict[int, int]:
        return {g: i for i, g in enumerate(self.order)}

    def validate_for(self, group_ids: Sequence[int]) -> None:
        if sorted(self.order) != sorted(int(g) for g in group_ids):
            raise LayoutError(f"order {self.order} is not a permutation of {tuple(group_ids)}")


@dataclass(frozen=True)
class ExogeneityScores:
    """Per-candidate scores of one method on one dataset; lower is more exogenous."""

    method: Method
    scores: Mapping[int, float]
    chosen: int = field(default=0)

    def __post_init__(self):
        scores = {int(g): float(v) for g, v in self.scores.items()}
        if not scores:
            raise ValueError("no candidate scores")
        for g, v in scores.items():
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"score for group {g} is {v}; scores must be finite and >= 0")
        best = min(scores.values())
        chosen = min(g for g, v in scores.items() if v == best)
        object.__setattr__(self, "method", Method.parse(self.method))
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "chosen", chosen)
