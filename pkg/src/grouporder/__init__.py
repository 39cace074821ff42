"""Causal ordering of groups of variables in linear acyclic models."""

from .data import (
    CausalOrder,
    ExogeneityScores,
    GroupedDataMatrix,
    GroupLayout,
    Method,
    block_permute,
    extract_group,
)
from .errors import (
    DegenerateVariableError,
    GroupOrderError,
    NoEffectError,
    OrderingError,
    SingularRegressorsError,
)
from .ordering import (
    OrderingOptions,
    OrderingTrace,
    draw_subgroups,
    estimate_order,
    mean_aggregate,
    pooled_scores,
    regress_out,
)
from .scoring import score, score_gdl, score_pairwise, score_trace
from .synthgen import GenConfig, ModelSpec, generate_model, sample_data

__version__ = "0.1.0"

__all__ = [
    "CausalOrder",
    "DegenerateVariableError",
    "ExogeneityScores",
    "GenConfig",
    "GroupLayout",
    "GroupOrderError",
    "GroupedDataMatrix",
    "Method",
    "ModelSpec",
    "NoEffectError",
    "OrderingError",
    "OrderingOptions",
    "OrderingTrace",
    "SingularRegressorsError",
    "block_permute",
    "draw_subgroups",
    "estimate_order",
    "extract_group",
    "generate_model",
    "mean_aggregate",
    "pooled_scores",
    "regress_out",
    "sample_data",
    "score",
    "score_gdl",
    "score_pairwise",
    "score_trace",
]
