"""PCA fitting and projection for reducing PHOC descriptors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray  # (input_dim,)
    components: np.ndarray  # (d, input_dim), orthonormal rows
    explained_variance: np.ndarray  # (d,), nonincreasing

    @property
    def d(self) -> int:
        return self.components.shape[0]

    @property
    def input_dim(self) -> int:
        return self.components.shape[1]


def fit_pca(data: np.ndarray, d: int) -> PcaModel:
    """Top-d eigenvectors of the sample covariance (divisor M-1) of ``data``.

    Sign convention: each component is flipped so its largest-magnitude
    coordinate is positive, which pins the eigenvector sign ambiguity.
    Rank-deficient data is fine; trailing eigenvalues may be zero.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("data must be a 2-D matrix")
    m = data.shape[0]
    if not 1 <= d <= data.shape[1]:
        raise ValueError(f"d={d} out of range for {data.shape[1]}-dim data")
    if m < d:
        raise ValueError(f"need at least d={d} rows, got {m}")

    mean = data.mean(axis=0)
    centered = data - mean
    cov = (centered.T @ centered) / (m - 1) if m > 1 else np.zeros((data.shape[1],) * 2)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(-eigvals, kind="stable")[:d]
    variance = np.maximum(eigvals[order], 0.0)
    components = eigvecs[:, order].T.copy()

    for row in components:
        pivot = np.argmax(np.abs(row))
        if row[pivot] == 0.0:
            raise ValueError("degenerate all-zero principal component")
        if row[pivot] < 0.0:
            row *= -1.0
    return PcaModel(mean=mean, components=components, explained_variance=variance)


def project(model: PcaModel, x: np.ndarray) -> np.ndarray:
    """components @ (x - mean); accepts a single vector or a stack of rows."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.input_dim:
        raise ValueError(f"expected {model.input_dim}-dim input, got {x.shape[-1]}")
    return (x - model.mean) @ model.components.T
