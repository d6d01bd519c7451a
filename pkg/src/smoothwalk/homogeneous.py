"""Time-homogeneous chain analysis: stationary distributions, total-variation
curves, mixing times, and the spectral closed form for walk propagation.

Norm conventions: ``l1`` is the plain L1 sum; total variation is half of it.
Fixing TV = L1/2 keeps the contraction inequality and the monotone-distance
property consistent with each other.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    Disconnected,
    GammaOutOfRange,
    NotConverged,
    NotMixedBy,
    NotStationary,
    PreconditionViolated,
)
from .graph import Graph, is_bipartite, is_connected
from .operators import StochasticMatrix, simple_rw, lazy_walk

__all__ = [
    "SpectralDecomposition",
    "l1_distance",
    "tv_distance",
    "stationary_analytic",
    "stationary_power",
    "d_curve",
    "mixing_time",
    "spectral_decomposition",
    "spectral_propagate",
    "convergence_rate",
    "fit_decay_rate",
    "verify_lazy_slower",
    "LazyComparison",
]


def l1_distance(mu: np.ndarray, nu: np.ndarray) -> float:
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if mu.shape != nu.shape:
        raise DimensionMismatch(f"{mu.shape} vs {nu.shape}")
    return float(np.abs(mu - nu).sum())


def tv_distance(mu: np.ndarray, nu: np.ndarray) -> float:
    """Total variation distance, half the L1 distance; in [0, 1]."""
    return 0.5 * l1_distance(mu, nu)


def stationary_analytic(g: Graph) -> np.ndarray:
    """Degree-proportional stationary distribution of the simple walk.

    pi(u) = deg(u) / sum_v deg(v); on a loop-free graph the denominator is
    2|E|, and the same formula stays valid once loops are added.
    """
    if not is_connected(g):
        raise Disconnected("stationary distribution needs a connected graph")
    deg = g.degree_vector()
    return deg / deg.sum()


def stationary_power(
    p: StochasticMatrix, tol: float = 1e-12, max_iter: int = 100_000
) -> np.ndarray:
    """Left fixed point by power iteration from the uniform distribution."""
    g = p.support_graph
    if not is_connected(g):
        raise PreconditionViolated("support graph is disconnected")
    if is_bipartite(g):
        raise PreconditionViolated("support graph is bipartite (period 2)")
    mu = np.full(p.n, 1.0 / p.n)
    for _ in range(max_iter):
        nxt = mu @ p.entries
        if np.abs(nxt - mu).sum() <= tol:
            return nxt
        mu = nxt
    raise NotConverged(max_iter)


def _check_stationary(p: StochasticMatrix, pi: np.ndarray, tol: float = 1e-10) -> None:
    if pi.shape != (p.n,):
        raise DimensionMismatch(f"pi has shape {pi.shape} for n={p.n}")
    if np.abs(pi @ p.entries - pi).sum() > tol:
        raise NotStationary("pi is not a fixed point of the operator")


def d_curve(p: StochasticMatrix, pi: np.ndarray, t_max: int) -> np.ndarray:
    """Worst-row TV distance to pi for t = 1..t_max; non-increasing."""
    _check_stationary(p, pi)
    out = np.empty(t_max)
    power = np.array(p.entries)
    for t in range(t_max):
        out[t] = 0.5 * np.abs(power - pi[None, :]).sum(axis=1).max()
        if t + 1 < t_max:
            power = power @ p.entries
    return out


def mixing_time(p: StochasticMatrix, pi: np.ndarray, eps: float, t_max: int) -> int:
    """Smallest t with d(t) <= eps; raises NotMixedBy if the budget runs out."""
    if not 0.0 < eps < 1.0:
        raise GammaOutOfRange(f"eps={eps} outside (0, 1)")
    _check_stationary(p, pi)
    power = np.array(p.entries)
    for t in range(1, t_max + 1):
        d = 0.5 * np.abs(power - pi[None, :]).sum(axis=1).max()
        if d <= eps:
            return t
        power = power @ p.entries
    raise NotMixedBy(t_max)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigensystem of the normalized Laplacian I - D^-1/2 A D^-1/2.

    Eigenvalues are ascending in [0, 2]; eigenvectors are the orthonormal
    columns of ``vectors``.
    """

    values: np.ndarray
    vectors: np.ndarray
    sqrt_deg: np.ndarray


def spectral_decomposition(g: Graph) -> SpectralDecomposition:
    if not is_connected(g):
        raise Disconnected("spectral analysis needs a connected graph")
    deg = g.degree_vector()
    sqrt_deg = np.sqrt(deg)
    norm_adj = g.adjacency() / np.outer(sqrt_deg, sqrt_deg)
    lap = np.eye(g.n) - norm_adj
    values, vectors = np.linalg.eigh(lap)
    return SpectralDecomposition(values=values, vectors=vectors, sqrt_deg=sqrt_deg)


def spectral_propagate(g: Graph, mu: np.ndarray, l: int, gamma: float = 0.0) -> np.ndarray:
    """Closed-form mu P^l through the Laplacian eigensystem.

    gamma=0 propagates the simple walk; gamma>0 the lazy walk, whose Laplacian
    is the plain one scaled by (1-gamma). Equals direct iteration to 1e-8.
    """
    if not 0.0 <= gamma < 1.0:
        raise GammaOutOfRange(f"gamma={gamma} outside [0, 1)")
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (g.n,):
        raise DimensionMismatch(f"mu has shape {mu.shape} for n={g.n}")
    dec = spectral_decomposition(g)
    coords = dec.vectors.T @ (mu / dec.sqrt_deg)
    factors = (1.0 - (1.0 - gamma) * dec.values) ** l
    return (dec.vectors @ (coords * factors)) * dec.sqrt_deg


def convergence_rate(g: Graph, gamma: float = 0.0) -> float:
    """Asymptotic decay rate max_{k>=2} |1 - (1-gamma) lambda_k| of d(t)."""
    if not 0.0 <= gamma < 1.0:
        raise GammaOutOfRange(f"gamma={gamma} outside [0, 1)")
    dec = spectral_decomposition(g)
    return float(np.abs(1.0 - (1.0 - gamma) * dec.values[1:]).max())


def fit_decay_rate(d_values: np.ndarray, floor: float = 1e-13) -> float:
    """Least-squares geometric rate of the tail of a d(t) curve.

    Uses the last half of the curve, dropping values at the floating-point
    floor. Returns exp(slope of log d).
    """
    d_values = np.asarray(d_values, dtype=float)
    usable = np.nonzero(d_values > floor)[0]
    if usable.size < 4:
        raise DimensionMismatch("curve too short (or too flat) to fit a rate")
    tail = usable[usable.size // 2:]
    slope = np.polyfit(tail.astype(float), np.log(d_values[tail]), 1)[0]
    return float(np.exp(slope))


@dataclass(frozen=True)
class LazyComparison:
    """Per-step worst-row TV distances of lazy vs plain walk, with verdicts."""

    gamma: float
    rw_d: np.ndarray
    lazy_d: np.ndarray
    verdicts: np.ndarray
    same_stationary: bool

    @property
    def all_slower(self) -> bool:
        return bool(self.verdicts.all())


def verify_lazy_slower(g: Graph, gamma: float, l_max: int) -> LazyComparison:
    """Check, step by step, that laziness never speeds up mixing.

    For each l in 1..l_max the lazy walk's worst-row TV distance to the shared
    stationary distribution must be >= the plain walk's (tolerance 1e-12).
    """
    pi = stationary_analytic(g)
    p_rw = simple_rw(g)
    p_lazy = lazy_walk(g, gamma)
    same = (
        np.abs(pi @ p_rw.entries - pi).sum() <= 1e-10
        and np.abs(pi @ p_lazy.entries - pi).sum() <= 1e-10
    )
    rw_d = np.empty(l_max)
    lazy_d = np.empty(l_max)
    rw_pow = np.array(p_rw.entries)
    lazy_pow = np.array(p_lazy.entries)
    for i in range(l_max):
        rw_d[i] = 0.5 * np.abs(rw_pow - pi[None, :]).sum(axis=1).max()
        lazy_d[i] = 0.5 * np.abs(lazy_pow - pi[None, :]).sum(axis=1).max()
        if i + 1 < l_max:
            rw_pow = rw_pow @ p_rw.entries
            lazy_pow = lazy_pow @ p_lazy.entries
    verdicts = lazy_d >= rw_d - 1e-12
    return LazyComparison(
        gamma=gamma, rw_d=rw_d, lazy_d=lazy_d, verdicts=verdicts, same_stationary=same
    )
