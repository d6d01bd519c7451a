"""Feature propagation and over-smoothing measurement.

Propagation is linear message passing only: H <- M H per layer, with no
activation between layers. Smoothing is measured as the across-node standard
deviation per feature (averaged over features); it is zero exactly when all
node rows coincide.
"""
from __future__ import annotations

import numpy as np
from scipy.special import expit

from .errors import (
    DimensionMismatch,
    MissingSelfLoops,
    ThresholdOutOfRange,
    TooFewNodes,
    TooShort,
)
from .graph import Graph
from .inhomogeneous import ChainSchedule
from .operators import StochasticMatrix, SymmetricOperator

__all__ = [
    "propagate_features",
    "feature_view_transform",
    "feature_view_inverse",
    "node_std_metric",
    "rt_penalty",
    "min_layer_gap",
]


def _layer_matrices(operator, num_layers: int | None) -> list[np.ndarray]:
    if isinstance(operator, ChainSchedule):
        mats = [layer.entries for layer in operator.layers]
        if num_layers is not None and num_layers != len(mats):
            raise DimensionMismatch(
                f"schedule has {len(mats)} layers, requested {num_layers}"
            )
        return mats
    if isinstance(operator, (StochasticMatrix, SymmetricOperator)):
        mat = operator.entries
    else:
        mat = np.asarray(operator, dtype=float)
    if num_layers is None:
        raise DimensionMismatch("a layer count is required for a single operator")
    return [mat] * num_layers


def propagate_features(operator, h0: np.ndarray, num_layers: int | None = None) -> list[np.ndarray]:
    """Trajectory H^(0)..H^(L) under H^(l) = M^(l) H^(l-1).

    ``operator`` may be a single operator (stochastic, symmetric, or a raw
    matrix) applied every layer, or a schedule supplying one matrix per layer.
    """
    h = np.asarray(h0, dtype=float)
    if h.ndim == 1:
        h = h[:, None]
    mats = _layer_matrices(operator, num_layers)
    if mats and mats[0].shape[1] != h.shape[0]:
        raise DimensionMismatch(
            f"operator is {mats[0].shape[0]}x{mats[0].shape[1]}, features have {h.shape[0]} rows"
        )
    out = [h]
    for mat in mats:
        h = mat @ h
        out.append(h)
    return out


def feature_view_transform(g: Graph, h: np.ndarray) -> np.ndarray:
    """Map node features H (N x F) to the walk-side view (D^1/2 H)^T (F x N)."""
    if not g.has_self_loops:
        raise MissingSelfLoops("the feature view is defined on the loop-augmented graph")
    h = np.asarray(h, dtype=float)
    if h.shape[0] != g.n:
        raise DimensionMismatch(f"features have {h.shape[0]} rows for n={g.n}")
    return (np.sqrt(g.degree_vector())[:, None] * h).T


def feature_view_inverse(g: Graph, x: np.ndarray) -> np.ndarray:
    """Inverse of the walk-side view; round-trips within 1e-12."""
    if not g.has_self_loops:
        raise MissingSelfLoops("the feature view is defined on the loop-augmented graph")
    x = np.asarray(x, dtype=float)
    if x.shape[1] != g.n:
        raise DimensionMismatch(f"view has {x.shape[1]} columns for n={g.n}")
    return x.T / np.sqrt(g.degree_vector())[:, None]


def node_std_metric(h: np.ndarray) -> float:
    """Mean over features of the across-node standard deviation.

    Lower means more smoothed; exactly 0 when every node row is identical.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim == 1:
        h = h[:, None]
    if h.shape[0] < 2:
        raise TooFewNodes("need at least two nodes to measure spread")
    return float(h.std(axis=0).mean())


def _layer_sigmoid_gaps(trajectory: list[np.ndarray]) -> np.ndarray:
    """Per-layer mean (over nodes) L1 gap between consecutive sigmoid features."""
    gaps = np.empty(len(trajectory) - 1)
    for i in range(1, len(trajectory)):
        diff = np.abs(expit(trajectory[i - 1]) - expit(trajectory[i]))
        gaps[i - 1] = diff.sum(axis=1).mean()
    return gaps


def rt_penalty(trajectory: list[np.ndarray], threshold: float) -> float:
    """Squared deviation of the mean inter-layer sigmoid gap from the threshold.

    Zero exactly when the layer-averaged gap equals the threshold, i.e. the
    representations keep moving at the prescribed speed instead of settling.
    """
    if not 0.0 < threshold < 1.0:
        raise ThresholdOutOfRange(f"threshold {threshold} outside (0, 1)")
    if len(trajectory) < 2:
        raise TooShort("need at least one layer transition")
    mean_gap = _layer_sigmoid_gaps(trajectory).mean()
    return float((mean_gap - threshold) ** 2)


def min_layer_gap(trajectory: list[np.ndarray]) -> float:
    """Smallest per-node L1 move between consecutive layers; the empirical
    margin by which representations keep changing."""
    if len(trajectory) < 2:
        raise TooShort("need at least one layer transition")
    best = np.inf
    for i in range(1, len(trajectory)):
        per_node = np.abs(trajectory[i] - trajectory[i - 1]).sum(axis=1)
        best = min(best, per_node.min())
    return float(best)
