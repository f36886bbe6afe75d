"""Diagonal-covariance Gaussian mixtures trained by EM."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GmmModel:
    weights: np.ndarray  # (K,), nonnegative, sums to 1
    means: np.ndarray  # (K, d)
    variances: np.ndarray  # (K, d), >= the variance floor used at fit time
    training_log_likelihoods: tuple[float, ...] = field(default=(), compare=False)

    @property
    def k(self) -> int:
        return self.means.shape[0]

    @property
    def d(self) -> int:
        return self.means.shape[1]


@dataclass(frozen=True)
class EmConfig:
    seed: int = 0
    max_iters: int = 200
    tol: float = 1e-6
    variance_floor: float = 1e-6

    def __post_init__(self):
        if self.tol <= 0 or self.variance_floor <= 0:
            raise ValueError("tol and variance_floor must be positive")


def _log_weights(weights):
    with np.errstate(divide="ignore"):
        return np.where(weights > 0, np.log(np.where(weights > 0, weights, 1.0)), -np.inf)


def _log_joint_matrix(model: GmmModel, x: np.ndarray) -> np.ndarray:
    x = np.ascontiguousarray(np.atleast_2d(np.asarray(x, dtype=np.float64)))
    if x.shape[1] != model.d:
        raise ValueError(f"expected {model.d}-dim points, got {x.shape[1]}")
    return _kernels.log_joint(
        x,
        np.ascontiguousarray(model.means),
        np.ascontiguousarray(model.variances),
        np.ascontiguousarray(_log_weights(model.weights)),
    )


def _logsumexp_rows(lj):
    top = np.max(lj, axis=1)
    return top + np.log(np.sum(np.exp(lj - top[:, None]), axis=1))


def log_density(model: GmmModel, x: np.ndarray) -> float:
    """log of the mixture density at ``x``, via log-sum-exp."""
    lj = _log_joint_matrix(model, x)
    return float(_logsumexp_rows(lj)[0])


def posteriors(model: GmmModel, x: np.ndarray) -> np.ndarray:
    """Component responsibilities q_k proportional to w_k * N_k(x)."""
    lj = _log_joint_matrix(model, x)
    q = np.exp(lj[0] - np.max(lj[0]))
    return q / q.sum()


def _responsibilities(model: GmmModel, x: np.ndarray):
    lj = _log_joint_matrix(model, x)
    lse = _logsumexp_rows(lj)
    q = np.exp(lj - lse[:, None])
    return q, float(lse.sum())


def _kmeanspp_centers(data, k, rng):
    m = data.shape[0]
    centers = np.empty((k, data.shape[1]), dtype=np.float64)
    centers[0] = data[rng.integers(m)]
    d2 = np.sum((data - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(m, p=d2 / total)
        else:
            idx = rng.integers(m)
        centers[j] = data[idx]
        d2 = np.minimum(d2, np.sum((data - centers[j]) ** 2, axis=1))
    return centers


def _hard_init(data, centers, floor):
    k = centers.shape[0]
    m = data.shape[0]
    dist = np.sum((data[:, None, :] - centers[None]) ** 2, axis=2)
    assign = np.argmin(dist, axis=1)
    weights = np.empty(k)
    means = np.empty_like(centers)
    variances = np.empty_like(centers)
    global_var = np.maximum(data.var(axis=0), floor)
    for j in range(k):
        mask = assign == j
        n_j = int(mask.sum())
        weights[j] = n_j
        if n_j == 0:
            # Possible only when seeds coincide; keep the seed alive.
            means[j] = centers[j]
            variances[j] = global_var
            weights[j] = 1.0
        else:
            means[j] = data[mask].mean(axis=0)
            variances[j] = np.maximum(data[mask].var(axis=0), floor)
    return weights / weights.sum(), means, variances


def _em_step(model: GmmModel, data: np.ndarray, variance_floor: float):
    """One EM iteration; returns (updated model, log-likelihood, reseeded ids).

    A component whose responsibility mass vanishes is reinitialized at the
    point the current mixture assigns the lowest density, with the global
    per-dimension variance and a 1/M weight.
    """
    m, k = data.shape[0], model.k
    q, ll = _responsibilities(model, data)
    mass = q.sum(axis=0)
    dead = {int(j) for j in np.flatnonzero(mass <= m * 1e-12)}

    new_weights = mass / m
    new_means = np.empty_like(model.means)
    new_vars = np.empty_like(model.variances)
    for j in range(k):
        if j in dead:
            continue
        new_means[j] = (q[:, j] @ data) / mass[j]
        diff = data - new_means[j]
        new_vars[j] = np.maximum((q[:, j] @ (diff * diff)) / mass[j], variance_floor)

    if dead:
        lse = _logsumexp_rows(_log_joint_matrix(model, data))
        outlier = int(np.argmin(lse))
        global_var = np.maximum(data.var(axis=0), variance_floor)
        for j in sorted(dead):
            logger.warning("component %d collapsed; reseeding from point %d", j, outlier)
            new_means[j] = data[outlier]
            new_vars[j] = global_var
            new_weights[j] = 1.0 / m
        new_weights = new_weights / new_weights.sum()

    updated = GmmModel(weights=new_weights, means=new_means, variances=new_vars)
    return updated, ll, sorted(dead)


def fit_gmm(data: np.ndarray, k: int, config: EmConfig = EmConfig()) -> GmmModel:
    """EM fit with k-means++ initialization, deterministic for a given seed.

    The per-iteration total log-likelihood trace is recorded on the returned
    model (``training_log_likelihoods``).
    """
    data = np.ascontiguousarray(np.asarray(data, dtype=np.float64))
    if data.ndim != 2:
        raise ValueError("data must be a 2-D matrix")
    m = data.shape[0]
    if k < 1 or m < k:
        raise ValueError(f"need at least k={k} points, got {m}")

    rng = np.random.default_rng(config.seed)
    centers = _kmeanspp_centers(data, k, rng)
    weights, means, variances = _hard_init(data, centers, config.variance_floor)
    model = GmmModel(weights=weights, means=means, variances=variances)

    trace: list[float] = []
    prev_ll = -np.inf
    for _ in range(config.max_iters):
        model, ll, _ = _em_step(model, data, config.variance_floor)
        trace.append(ll)
        if np.isfinite(prev_ll):
            denom = max(abs(prev_ll), 1e-300)
            if (ll - prev_ll) / denom < config.tol:
                break
        prev_ll = ll

    return GmmModel(
        weights=model.weights,
        means=model.means,
        variances=model.variances,
        training_log_likelihoods=tuple(trace),
    )
