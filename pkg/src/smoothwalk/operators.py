"""One-step operators on graphs and the Dobrushin contraction coefficient.

All stochastic operators are dense row-stochastic matrices whose support is
bounded by the edge set of a backing graph. Dense is deliberate: the target
scale is a few hundred nodes, where O(n^3) scans are instantaneous.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BetaNotPositive,
    DimensionMismatch,
    GammaOutOfRange,
    IsolatedNode,
    MissingLogit,
    MissingSelfLoops,
)
from .graph import Graph

__all__ = [
    "StochasticMatrix",
    "SymmetricOperator",
    "simple_rw",
    "gcn_operator",
    "lazy_walk",
    "dropedge_expected",
    "attention_operator",
    "gen_softmax_operator",
    "dobrushin_coefficient",
]

ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class StochasticMatrix:
    """Row-stochastic transition matrix supported on a graph's edges.

    ``logits`` is set only for attention-built operators; it lets downstream
    code use the closed-form weighted-degree stationary distribution.
    """

    n: int
    entries: np.ndarray
    support_graph: Graph
    logits: dict[tuple[int, int], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        m = self.entries
        if m.shape != (self.n, self.n):
            raise DimensionMismatch(f"expected {(self.n, self.n)}, got {m.shape}")
        if np.any(m < 0):
            raise DimensionMismatch("negative transition probability")
        rowsums = m.sum(axis=1)
        if np.max(np.abs(rowsums - 1.0)) > ROW_SUM_TOL:
            raise DimensionMismatch("rows do not sum to 1")
        allowed = self.support_graph.adjacency() > 0
        if np.any((m > 0) & ~allowed):
            raise DimensionMismatch("support escapes the edge set")
        m.setflags(write=False)

    def row(self, u: int) -> np.ndarray:
        return self.entries[u]


@dataclass(frozen=True)
class SymmetricOperator:
    """Symmetric (not row-stochastic) operator, e.g. the convolution operator."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        m = self.entries
        if m.shape != (self.n, self.n):
            raise DimensionMismatch(f"expected {(self.n, self.n)}, got {m.shape}")
        if np.max(np.abs(m - m.T)) > 1e-12:
            raise DimensionMismatch("operator is not symmetric")
        m.setflags(write=False)


def _require_positive_degrees(g: Graph) -> np.ndarray:
    deg = g.degree_vector()
    for u in range(g.n):
        if deg[u] == 0:
            raise IsolatedNode(u)
    return deg


def simple_rw(g: Graph) -> StochasticMatrix:
    """Walk matrix D^-1 A: uniform step to a neighbor (loop counts itself)."""
    deg = _require_positive_degrees(g)
    entries = g.adjacency() / deg[:, None]
    return StochasticMatrix(n=g.n, entries=entries, support_graph=g)


def gcn_operator(g: Graph) -> SymmetricOperator:
    """Convolution operator D^-1/2 A D^-1/2 on the loop-augmented graph."""
    if not g.has_self_loops:
        raise MissingSelfLoops("convolution operator needs the loop-augmented graph")
    dinv = 1.0 / np.sqrt(g.degree_vector())
    entries = dinv[:, None] * g.adjacency() * dinv[None, :]
    return SymmetricOperator(n=g.n, entries=entries)


def lazy_walk(g: Graph, gamma: float) -> StochasticMatrix:
    """(1-gamma) * simple walk + gamma * I; stays put with probability gamma."""
    if not 0.0 < gamma < 1.0:
        raise GammaOutOfRange(f"gamma={gamma} outside (0, 1)")
    deg = _require_positive_degrees(g)
    entries = (1.0 - gamma) * (g.adjacency() / deg[:, None]) + gamma * np.eye(g.n)
    support = g if g.has_self_loops else _with_loop_support(g)
    return StochasticMatrix(n=g.n, entries=entries, support_graph=support)


def _with_loop_support(g: Graph) -> Graph:
    # Support graph for operators that add mass on the diagonal without
    # changing the walk's degree normalization.
    edges = set(g.edges) | {(u, u) for u in range(g.n)}
    degrees = tuple(d + (0 if (u, u) in g.edges else 1) for u, d in enumerate(g.degrees))
    return Graph(n=g.n, edges=frozenset(edges), has_self_loops=True, degrees=degrees)


def dropedge_expected(g: Graph) -> StochasticMatrix:
    """Expected one-step operator under uniform per-edge dropping.

    With each of the m edges independently dropped with probability 1/m,
    the expectation is (I - G) D^-1 A + G where G_uu = (1/m)^deg(u) is the
    probability that every edge at u is gone (the walker then stays put).
    """
    if not g.has_self_loops:
        raise MissingSelfLoops("edge dropping is defined on the loop-augmented graph")
    m = g.num_edges
    if m < 2:
        raise DimensionMismatch("need at least 2 edges to drop from")
    deg = g.degree_vector()
    stay = (1.0 / m) ** deg
    entries = (1.0 - stay)[:, None] * (g.adjacency() / deg[:, None]) + np.diag(stay)
    return StochasticMatrix(n=g.n, entries=entries, support_graph=g)


def attention_operator(g: Graph, logits: dict[tuple[int, int], float]) -> StochasticMatrix:
    """Row-softmax of per-directed-edge logits over each node's neighbors."""
    _require_positive_degrees(g)
    entries = np.zeros((g.n, g.n))
    adj = g.adjacency_lists()
    for u in range(g.n):
        nbrs = adj[u]
        row_logits = []
        for v in nbrs:
            if (u, v) not in logits:
                raise MissingLogit(u, v)
            row_logits.append(logits[(u, v)])
        row_logits = np.array(row_logits)
        row_logits -= row_logits.max()
        weights = np.exp(row_logits)
        entries[u, nbrs] = weights / weights.sum()
    return StochasticMatrix(n=g.n, entries=entries, support_graph=g, logits=dict(logits))


def gen_softmax_operator(
    g: Graph, features: np.ndarray, beta: float, eps: float = 1e-7
) -> StochasticMatrix:
    """Feature-induced softmax aggregation operator.

    The per-edge message is ReLU of the target node's (scalar-reduced)
    feature plus eps; rows are softmax at inverse temperature beta.
    """
    if beta <= 0.0:
        raise BetaNotPositive(f"beta={beta} must be positive")
    if eps <= 0.0:
        raise BetaNotPositive(f"eps={eps} must be positive")
    features = np.asarray(features, dtype=float)
    if features.ndim == 1:
        features = features[:, None]
    if features.shape[0] != g.n:
        raise DimensionMismatch(
            f"features have {features.shape[0]} rows for a graph on {g.n} nodes"
        )
    scalar = features.mean(axis=1)
    messages = np.maximum(scalar, 0.0) + eps
    logits = {}
    for a, b in g.edges:
        logits[(a, b)] = beta * messages[b]
        if a != b:
            logits[(b, a)] = beta * messages[a]
    # A row-softmax with feature-derived logits; the closed-form weighted-degree
    # stationary distribution applies to it unchanged.
    return attention_operator(g, logits)


def dobrushin_coefficient(p: StochasticMatrix | np.ndarray) -> float:
    """Half the largest L1 distance between any two rows; in [0, 1]."""
    m = p.entries if isinstance(p, StochasticMatrix) else np.asarray(p)
    diff = np.abs(m[:, None, :] - m[None, :, :]).sum(axis=2)
    return float(diff.max() / 2.0)
