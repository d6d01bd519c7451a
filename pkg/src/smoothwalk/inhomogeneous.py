"""Diagnostics for time-inhomogeneous chains (per-layer operators).

Covers per-layer stationary distributions, the three-part sufficient-condition
check for a limiting distribution (per-layer stationaries exist, their drift
is summable, operator products contract), trajectory propagation, and the
necessary-condition test linking trajectory convergence to stationary drift.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    HypothesisViolated,
    PreconditionViolated,
    TooShort,
)
from .graph import is_bipartite, is_connected
from .homogeneous import l1_distance, stationary_power
from .operators import StochasticMatrix, dobrushin_coefficient

__all__ = [
    "ChainSchedule",
    "DimReport",
    "NecessaryConditionReport",
    "attention_stationary",
    "propagate_inhomogeneous",
    "layer_stationary",
    "dim_check",
    "necessary_condition_check",
    "cauchy_gap_series",
]

# Classification thresholds: a numeric check must not overclaim limits, so
# "converged" needs gaps at noise level and "non_converged" needs a proven
# lower bound clearly above it.
CONVERGED_GAP = 1e-9
NONCONVERGED_BOUND = 1e-6


@dataclass(frozen=True)
class ChainSchedule:
    """Ordered per-layer operators sharing one support graph."""

    layers: tuple[StochasticMatrix, ...]

    def __post_init__(self):
        if len(self.layers) < 1:
            raise TooShort("a schedule needs at least one layer")
        first = self.layers[0]
        for layer in self.layers[1:]:
            if layer.n != first.n:
                raise DimensionMismatch("layers differ in dimension")
            if layer.support_graph.edges != first.support_graph.edges:
                raise DimensionMismatch("layers differ in support graph")

    def __len__(self) -> int:
        return len(self.layers)

    @property
    def n(self) -> int:
        return self.layers[0].n

    @property
    def support_graph(self):
        return self.layers[0].support_graph


def attention_stationary(
    p_att: StochasticMatrix, logits: dict[tuple[int, int], float] | None = None
) -> np.ndarray:
    """Closed-form stationary distribution of a row-softmax operator.

    pi(u) is proportional to the weighted degree sum_{z in N(u)} exp(logit(u, z)).
    """
    g = p_att.support_graph
    if not is_connected(g) or is_bipartite(g):
        raise PreconditionViolated("needs a connected non-bipartite support graph")
    if logits is None:
        logits = p_att.logits
    if logits is None:
        raise PreconditionViolated("operator carries no logits and none were given")
    adj = g.adjacency_lists()
    wdeg = np.zeros(g.n)
    for u in range(g.n):
        wdeg[u] = sum(np.exp(logits[(u, z)]) for z in adj[u])
    return wdeg / wdeg.sum()


def propagate_inhomogeneous(
    mu0: np.ndarray, schedule: ChainSchedule
) -> list[np.ndarray]:
    """Trajectory mu_0, mu_1 = mu_0 P^(1), ..., mu_L."""
    mu = np.asarray(mu0, dtype=float)
    if mu.shape != (schedule.n,):
        raise DimensionMismatch(f"mu0 has shape {mu.shape} for n={schedule.n}")
    out = [mu]
    for layer in schedule.layers:
        mu = mu @ layer.entries
        out.append(mu)
    return out


def _symmetric_logits(logits: dict[tuple[int, int], float]) -> bool:
    return all(
        abs(val - logits.get((v, u), np.nan)) <= 1e-12 for (u, v), val in logits.items()
    )


def layer_stationary(layer: StochasticMatrix) -> np.ndarray:
    """Per-layer stationary distribution.

    The weighted-degree closed form is a genuine fixed point only when the
    logits are symmetric; asymmetric attention layers (and plain operators)
    go through power iteration instead.
    """
    if layer.logits is not None and _symmetric_logits(layer.logits):
        return attention_stationary(layer)
    return stationary_power(layer)


@dataclass(frozen=True)
class DimReport:
    """Evidence for/against a limiting distribution of a schedule."""

    per_layer_pi: list[np.ndarray]
    drift_partial_sums: np.ndarray
    dobrushin_products: dict[int, np.ndarray]
    stationary_exists: bool
    drift_summable: bool
    dobrushin_vanishes: bool
    classification: str
    trajectory_gaps: np.ndarray
    gap_lower_bound: float


def dim_check(
    schedule: ChainSchedule,
    drift_tol: float = 1e-3,
    dobrushin_window: int = 0,
) -> DimReport:
    """Probe the sufficient conditions for a limiting distribution.

    Partial sums of the per-layer stationary drift address summability;
    contraction coefficients of operator products C(P^(k)...P^(n)) are sampled
    for k = 1 and k = L/2 (and every ``dobrushin_window``-th k if set).

    Classification is conservative about limits a finite horizon cannot see:
    "non_converged" needs the per-layer stationary drift to stay roughly
    constant across the whole schedule with the proven trajectory-gap lower
    bound above noise; "converged" needs either tail gaps at noise level or
    both sufficient-condition probes (summable drift, vanishing products) to
    come out positive; anything else is "undetermined".
    """
    g = schedule.support_graph
    if not is_connected(g) or is_bipartite(g):
        raise PreconditionViolated("needs a connected non-bipartite support graph")
    L = len(schedule)
    pis = [layer_stationary(layer) for layer in schedule.layers]

    drifts = np.array([l1_distance(pis[i], pis[i + 1]) for i in range(L - 1)])
    partial_sums = np.cumsum(drifts) if L > 1 else np.zeros(0)

    ks = {1, L // 2 + 1}
    if dobrushin_window > 0:
        ks.update(range(1, L + 1, dobrushin_window))
    products: dict[int, np.ndarray] = {}
    for k in sorted(k for k in ks if 1 <= k <= L):
        vals = np.empty(L - k + 1)
        prod = np.eye(schedule.n)
        for i, layer in enumerate(schedule.layers[k - 1:]):
            prod = prod @ layer.entries
            vals[i] = dobrushin_coefficient(prod)
        products[k] = vals

    drift_summable = drifts.size == 0 or (
        drifts[-1] <= drift_tol and drifts[-1] <= drifts[0] + 1e-12
    )
    # Products are non-increasing by sub-multiplicativity; "vanishes" asks for
    # clear decay over the observed window, not literal zero.
    dobrushin_vanishes = all(
        vals[-1] <= max(1e-9, 0.75 * vals[0]) for vals in products.values()
    )

    mu0 = np.full(schedule.n, 1.0 / schedule.n)
    gaps = np.array(cauchy_gap_series(propagate_inhomogeneous(mu0, schedule))) \
        if L >= 1 else np.zeros(0)
    tail = gaps[-max(3, L // 4):] if gaps.size else gaps

    c_max = max(dobrushin_coefficient(layer) for layer in schedule.layers)
    min_drift = float(drifts.min()) if drifts.size else 0.0
    max_drift = float(drifts.max()) if drifts.size else 0.0
    bound = (1.0 - c_max) * min_drift if c_max < 1.0 else 0.0
    # The gap lower bound only rules out convergence going forward when the
    # drift is not merely positive somewhere but stays near its peak through
    # the whole schedule; a decaying drift can be summable despite a positive
    # minimum over a finite prefix.
    steady_drift = drifts.size > 0 and min_drift >= 0.5 * max_drift and min_drift > 0

    if steady_drift and bound > NONCONVERGED_BOUND:
        classification = "non_converged"
    elif (tail.size and tail.max() < CONVERGED_GAP) or (
        drift_summable and dobrushin_vanishes
    ):
        classification = "converged"
    else:
        classification = "undetermined"

    return DimReport(
        per_layer_pi=pis,
        drift_partial_sums=partial_sums,
        dobrushin_products=products,
        stationary_exists=True,
        drift_summable=drift_summable,
        dobrushin_vanishes=dobrushin_vanishes,
        classification=classification,
        trajectory_gaps=gaps,
        gap_lower_bound=float(bound),
    )


@dataclass(frozen=True)
class NecessaryConditionReport:
    c_values: np.ndarray
    pi_hat: np.ndarray
    trajectory_tail_norms: np.ndarray
    stationary_tail_norms: np.ndarray
    trajectory_converged: bool
    stationary_converged: bool
    consistent: bool
    min_drift: float
    contrapositive_triggered: bool


def necessary_condition_check(
    schedule: ChainSchedule,
    mu0: np.ndarray,
    tail_window: int = 5,
    tol: float = 1e-6,
) -> NecessaryConditionReport:
    """Test that trajectory convergence forces per-layer stationary convergence.

    Requires every layer to contract strictly (C(P) < 1). The limit candidate
    is the tail average of the trajectory. The contrapositive is flagged when
    the per-layer stationary drift stays bounded away from zero while the
    trajectory gaps stay above the proven (1 - C) * drift lower bound.
    """
    c_values = np.array([dobrushin_coefficient(layer) for layer in schedule.layers])
    if np.any(c_values >= 1.0):
        raise HypothesisViolated("some layer has C(P) >= 1")
    trajectory = propagate_inhomogeneous(mu0, schedule)
    L = len(schedule)
    tail_window = min(tail_window, L)
    pis = [layer_stationary(layer) for layer in schedule.layers]

    pi_hat = np.mean(trajectory[-tail_window:], axis=0)
    traj_norms = np.array([l1_distance(m, pi_hat) for m in trajectory[-tail_window:]])
    pi_norms = np.array([l1_distance(p, pi_hat) for p in pis[-tail_window:]])
    traj_ok = bool(traj_norms.max() < tol)
    pi_ok = bool(pi_norms.max() < tol)

    drifts = [l1_distance(pis[i], pis[i + 1]) for i in range(L - 1)]
    min_drift = float(min(drifts)) if drifts else 0.0
    gaps = cauchy_gap_series(trajectory) if L >= 1 else []
    contrapositive = False
    if min_drift > tol:
        # Proof-level bound: each gap exceeds (1 - C(P^(n))) * drift floor.
        bounds = (1.0 - c_values) * min_drift
        contrapositive = all(gap > b - 1e-12 for gap, b in zip(gaps, bounds))
    return NecessaryConditionReport(
        c_values=c_values,
        pi_hat=pi_hat,
        trajectory_tail_norms=traj_norms,
        stationary_tail_norms=pi_norms,
        trajectory_converged=traj_ok,
        stationary_converged=pi_ok,
        consistent=(not traj_ok) or pi_ok,
        min_drift=min_drift,
        contrapositive_triggered=contrapositive,
    )


def cauchy_gap_series(trajectory: list[np.ndarray]) -> list[float]:
    """L1 gaps between consecutive trajectory points."""
    if len(trajectory) < 2:
        raise TooShort("need at least two points to form gaps")
    return [
        l1_distance(trajectory[i], trajectory[i - 1]) for i in range(1, len(trajectory))
    ]
