"""Toy gradient-descent demonstration of gap-preserving regularization.

Per-layer attention logits are the free parameters (one raw logit per
directed edge); the task is few-shot one-hot regression on a handful of
labeled nodes. Gradients come from central finite differences — parameter
counts are tiny, so this removes an entire autodiff subsystem at
O(params * cost(forward)) per step.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, Diverged, NoLabels, ThresholdOutOfRange
from .graph import Graph
from .inhomogeneous import ChainSchedule, layer_stationary
from .homogeneous import l1_distance
from .operators import attention_operator
from .oversmoothing import min_layer_gap, node_std_metric, propagate_features, rt_penalty

__all__ = ["AttentionParams", "TrainConfig", "TrainReport", "forward", "loss", "train"]

FD_STEP = 1e-5


def directed_edges(g: Graph) -> tuple[tuple[int, int], ...]:
    """Canonical ordering of directed edges (loops once), shared by all layers."""
    out = []
    for u, v in sorted(g.edges):
        out.append((u, v))
        if u != v:
            out.append((v, u))
    return tuple(sorted(out))


@dataclass
class AttentionParams:
    """Per-layer, per-directed-edge logits behind each attention operator."""

    graph: Graph
    edges: tuple[tuple[int, int], ...]
    values: np.ndarray  # shape (num_layers, num_directed_edges)

    @classmethod
    def zeros(cls, g: Graph, num_layers: int) -> "AttentionParams":
        edges = directed_edges(g)
        return cls(graph=g, edges=edges, values=np.zeros((num_layers, len(edges))))

    @property
    def num_layers(self) -> int:
        return self.values.shape[0]

    def logits_for_layer(self, layer: int) -> dict[tuple[int, int], float]:
        return dict(zip(self.edges, self.values[layer]))

    def schedule(self) -> ChainSchedule:
        return ChainSchedule(
            layers=tuple(
                attention_operator(self.graph, self.logits_for_layer(l))
                for l in range(self.num_layers)
            )
        )


@dataclass
class TrainConfig:
    learning_rate: float
    epochs: int
    rt_weight: float
    threshold: float
    seed: int
    labeled_nodes: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise DimensionMismatch("learning rate must be positive")
        if not 0.0 < self.threshold < 1.0:
            raise ThresholdOutOfRange(f"threshold {self.threshold} outside (0, 1)")
        if self.rt_weight < 0:
            raise DimensionMismatch("regularizer weight must be nonnegative")


def forward(params: AttentionParams, g: Graph, h0: np.ndarray) -> list[np.ndarray]:
    """Trajectory of features through the per-layer attention operators."""
    h0 = np.asarray(h0, dtype=float)
    if h0.shape[0] != g.n:
        raise DimensionMismatch(f"features have {h0.shape[0]} rows for n={g.n}")
    if params.num_layers == 0:
        return [h0]
    return propagate_features(params.schedule(), h0)


def loss(params: AttentionParams, g: Graph, h0: np.ndarray, config: TrainConfig) -> float:
    """Mean-squared one-hot error on labeled nodes plus the gap regularizer."""
    if not config.labeled_nodes:
        raise NoLabels("at least one labeled node is required")
    trajectory = forward(params, g, h0)
    final = trajectory[-1]
    task = 0.0
    for node, target in config.labeled_nodes.items():
        task += float(np.mean((final[node] - np.asarray(target)) ** 2))
    task /= len(config.labeled_nodes)
    if config.rt_weight > 0:
        return task + config.rt_weight * rt_penalty(trajectory, config.threshold)
    return task


def _gradient(params: AttentionParams, g: Graph, h0, config, step: float = FD_STEP) -> np.ndarray:
    grad = np.zeros_like(params.values)
    flat = params.values.ravel()
    gflat = grad.ravel()
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + step
        up = loss(params, g, h0, config)
        flat[i] = orig - step
        down = loss(params, g, h0, config)
        flat[i] = orig
        gflat[i] = (up - down) / (2.0 * step)
    return grad


@dataclass
class TrainReport:
    params: AttentionParams
    loss_curve: np.ndarray
    final_loss: float
    task_loss: float
    min_layer_gap: float
    node_std_final: float
    pi_drift: np.ndarray


def train(g: Graph, h0: np.ndarray, config: TrainConfig, num_layers: int = 8) -> TrainReport:
    """Plain gradient descent on the logits; deterministic for a fixed seed."""
    rng = np.random.default_rng(config.seed)
    params = AttentionParams.zeros(g, num_layers)
    params.values += 0.01 * rng.standard_normal(params.values.shape)
    curve = np.empty(config.epochs + 1)
    curve[0] = loss(params, g, h0, config)
    for epoch in range(config.epochs):
        grad = _gradient(params, g, h0, config)
        params.values -= config.learning_rate * grad
        value = loss(params, g, h0, config)
        if not np.isfinite(value):
            raise Diverged(f"loss became non-finite at epoch {epoch}")
        curve[epoch + 1] = value

    trajectory = forward(params, g, h0)
    task_only = TrainConfig(
        learning_rate=config.learning_rate,
        epochs=config.epochs,
        rt_weight=0.0,
        threshold=config.threshold,
        seed=config.seed,
        labeled_nodes=config.labeled_nodes,
    )
    pis = [layer_stationary(layer) for layer in params.schedule().layers]
    drift = np.array([l1_distance(pis[i], pis[i + 1]) for i in range(len(pis) - 1)])
    return TrainReport(
        params=params,
        loss_curve=curve,
        final_loss=float(curve[-1]),
        task_loss=loss(params, g, h0, task_only),
        min_layer_gap=min_layer_gap(trajectory),
        node_std_final=node_std_metric(trajectory[-1]),
        pi_drift=drift,
    )
