"""Random edge-dropping environments and the induced random walk.

Each layer independently keeps every edge of the loop-augmented graph with
probability 1 - 1/m (m = edge count, loops included). The walk steps
uniformly over the surviving incident edges; a node that lost all of its
edges keeps the walker in place, which is the only stay rule that makes the
expected operator row-stochastic and reproduces the analytic expectation.

Per-sample generators are derived from (base_seed, sample_index) through a
splittable seed sequence, so estimates are independent of evaluation order.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DimensionMismatch, MissingSelfLoops, TooFewSamples
from .graph import Graph
from .operators import StochasticMatrix

__all__ = [
    "EnvironmentSpec",
    "EnvironmentSample",
    "sample_environment",
    "random_transition",
    "monte_carlo_expected",
    "exhaustive_expected",
    "degree_law_check",
    "DegreeLawReport",
]


@dataclass(frozen=True)
class EnvironmentSpec:
    """Edge-dropping environment over a loop-augmented base graph.

    ``drop_probability`` defaults to 1/m so that on average a single edge is
    dropped per layer; an override is accepted for exploration.
    """

    base_graph: Graph
    base_seed: int
    drop_probability: float | None = None

    def __post_init__(self):
        if not self.base_graph.has_self_loops:
            raise MissingSelfLoops("environment is defined on the loop-augmented graph")
        if self.base_graph.num_edges < 2:
            raise DimensionMismatch("need at least 2 edges to drop from")
        p = self.effective_drop_probability
        if not 0.0 < p < 1.0:
            raise DimensionMismatch(f"drop probability {p} outside (0, 1)")

    @property
    def effective_drop_probability(self) -> float:
        if self.drop_probability is not None:
            return self.drop_probability
        return 1.0 / self.base_graph.num_edges

    @property
    def edge_order(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.base_graph.edges))


@dataclass(frozen=True)
class EnvironmentSample:
    """One realization: which edges survived and the resulting degrees."""

    spec: EnvironmentSpec
    kept_mask: np.ndarray
    realized_degrees: np.ndarray


def sample_environment(spec: EnvironmentSpec, sample_index: int) -> EnvironmentSample:
    """Draw the sample with the given index; deterministic and order-free."""
    seq = np.random.SeedSequence(entropy=spec.base_seed, spawn_key=(sample_index,))
    rng = np.random.default_rng(seq)
    edges = spec.edge_order
    kept = rng.random(len(edges)) >= spec.effective_drop_probability
    degrees = np.zeros(spec.base_graph.n, dtype=int)
    for keep, (u, v) in zip(kept, edges):
        if keep:
            degrees[u] += 1
            if u != v:
                degrees[v] += 1
    kept = np.asarray(kept)
    kept.setflags(write=False)
    degrees.setflags(write=False)
    return EnvironmentSample(spec=spec, kept_mask=kept, realized_degrees=degrees)


def _transition_entries(sample: EnvironmentSample) -> np.ndarray:
    g = sample.spec.base_graph
    entries = np.zeros((g.n, g.n))
    for keep, (u, v) in zip(sample.kept_mask, sample.spec.edge_order):
        if keep:
            entries[u, v] += 1.0
            if u != v:
                entries[v, u] += 1.0
    for u in range(g.n):
        z = sample.realized_degrees[u]
        if z > 0:
            entries[u] /= z
        else:
            entries[u, u] = 1.0
    return entries


def random_transition(sample: EnvironmentSample) -> StochasticMatrix:
    """Uniform walk over kept incident edges; stay put on total isolation."""
    g = sample.spec.base_graph
    return StochasticMatrix(n=g.n, entries=_transition_entries(sample), support_graph=g)


def monte_carlo_expected(
    spec: EnvironmentSpec, num_samples: int
) -> tuple[StochasticMatrix, np.ndarray]:
    """Entrywise sample mean of the random walk matrix plus standard errors."""
    if num_samples < 1:
        raise TooFewSamples("need at least one sample")
    if num_samples < 100 and num_samples != 1:
        raise TooFewSamples("need at least 100 samples (or exactly 1)")
    n = spec.base_graph.n
    chunk = 4096
    total = np.zeros((n, n))
    total_sq = np.zeros((n, n))
    for start in range(0, num_samples, chunk):
        stop = min(start + chunk, num_samples)
        block = np.empty((stop - start, n, n))
        for i, idx in enumerate(range(start, stop)):
            block[i] = _transition_entries(sample_environment(spec, idx))
        total += block.sum(axis=0)
        total_sq += (block * block).sum(axis=0)
    mean = total / num_samples
    if num_samples > 1:
        var = (total_sq - num_samples * mean * mean) / (num_samples - 1)
        se = np.sqrt(np.maximum(var, 0.0) / num_samples)
    else:
        se = np.zeros((n, n))
    # Guard against accumulated rounding in the row sums before validating.
    mean /= mean.sum(axis=1, keepdims=True)
    estimate = StochasticMatrix(n=n, entries=mean, support_graph=spec.base_graph)
    return estimate, se


def exhaustive_expected(spec: EnvironmentSpec, max_degree: int = 20) -> StochasticMatrix:
    """Exact expectation by enumerating all incident-edge masks per node.

    Row u depends only on the 2^deg(u) keep/drop patterns of the edges at u,
    so the enumeration is exact with no sampling. Intended as an oracle for
    small degrees.
    """
    g = spec.base_graph
    p_drop = spec.effective_drop_probability
    entries = np.zeros((g.n, g.n))
    incident: list[list[int]] = [[] for _ in range(g.n)]
    for u, v in g.edges:
        incident[u].append(v)
        if u != v:
            incident[v].append(u)
    for u in range(g.n):
        targets = sorted(incident[u])
        d = len(targets)
        if d > max_degree:
            raise DimensionMismatch(f"degree {d} at node {u} exceeds {max_degree}")
        for mask in itertools.product((0, 1), repeat=d):
            kept = [t for t, m in zip(targets, mask) if m]
            prob = 1.0
            for m in mask:
                prob *= (1.0 - p_drop) if m else p_drop
            if kept:
                for t in kept:
                    entries[u, t] += prob / len(kept)
            else:
                entries[u, u] += prob
    return StochasticMatrix(n=g.n, entries=entries, support_graph=g)


@dataclass(frozen=True)
class DegreeLawReport:
    node: int
    statistic: float
    p_value: float
    passed: bool
    observed: np.ndarray
    expected: np.ndarray


def degree_law_check(
    spec: EnvironmentSpec, num_samples: int, significance: float = 0.01
) -> list[DegreeLawReport]:
    """Chi-square test of realized degrees against Binomial(deg(u), 1 - p).

    Bins with expected count below 5 are pooled with their neighbor before
    testing; a single surviving bin passes trivially.
    """
    if num_samples < 1000:
        raise TooFewSamples("need at least 1000 samples for the chi-square check")
    g = spec.base_graph
    p_keep = 1.0 - spec.effective_drop_probability
    counts = np.zeros((g.n, int(g.degree_vector().max()) + 1), dtype=int)
    for idx in range(num_samples):
        sample = sample_environment(spec, idx)
        for u, z in enumerate(sample.realized_degrees):
            counts[u, z] += 1
    reports = []
    for u in range(g.n):
        d = int(g.degrees[u])
        expected = stats.binom.pmf(np.arange(d + 1), d, p_keep) * num_samples
        observed = counts[u, : d + 1].astype(float)
        obs_bins, exp_bins = _pool_small_bins(observed, expected)
        if len(obs_bins) < 2:
            reports.append(
                DegreeLawReport(u, 0.0, 1.0, True, observed, expected)
            )
            continue
        stat, p_value = stats.chisquare(obs_bins, exp_bins)
        reports.append(
            DegreeLawReport(u, float(stat), float(p_value), bool(p_value >= significance),
                            observed, expected)
        )
    return reports


def _pool_small_bins(observed: np.ndarray, expected: np.ndarray, floor: float = 5.0):
    obs: list[float] = []
    exp: list[float] = []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= floor:
            obs.append(acc_o)
            exp.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 and exp:
        obs[-1] += acc_o
        exp[-1] += acc_e
    # chisquare requires matching totals; renormalize the tiny residue.
    exp_arr = np.array(exp)
    obs_arr = np.array(obs)
    if exp_arr.size:
        exp_arr *= obs_arr.sum() / exp_arr.sum()
    return obs_arr, exp_arr
