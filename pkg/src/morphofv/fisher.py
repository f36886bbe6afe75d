"""Fisher vector encoding of a bag of reduced PHOC descriptors.

One image contributes a variable number of detected-word proposals; after
top-m selection each surviving word is embedded (PHOC), projected (PCA) and
the whole bag is aggregated against a trained mixture into a single
2*d*K-dimensional gradient vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .gmm import GmmModel, _log_joint_matrix
from .pca import PcaModel, project
from .phoc import Alphabet, OccupancyRule, build_phoc, normalize_word


@dataclass(frozen=True)
class WordProposal:
    """A detected word: either a transcription or a precomputed PHOC row."""

    text: str | None = None
    confidence: float = 0.0
    phoc: np.ndarray | None = None

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        if (self.text is None) == (self.phoc is None):
            raise ValueError("exactly one of text or phoc must be given")


@dataclass(frozen=True)
class ProposalSelector:
    m: int = 15
    min_confidence: float | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")


@dataclass(frozen=True)
class FisherVector:
    values: np.ndarray  # (2*d*K,)
    normalized: bool = False

    def __len__(self):
        return self.values.shape[0]


def select_top_m(proposals, selector: ProposalSelector):
    """Keep the ``m`` most confident proposals.

    Proposals whose text normalizes to the empty string are dropped first;
    confidence ties are broken by text in lexicographic order.  The optional
    confidence threshold is applied after truncation.
    """
    alive = [p for p in proposals if p.text is None or normalize_word(p.text)]
    ranked = sorted(alive, key=lambda p: (-p.confidence, p.text if p.text is not None else ""))
    ranked = ranked[: selector.m]
    if selector.min_confidence is not None:
        ranked = [p for p in ranked if p.confidence >= selector.min_confidence]
    return ranked


def encode_fv(model: GmmModel, points: np.ndarray) -> FisherVector:
    """Raw Fisher vector of an N x d point bag.

    Layout: the K mean-deviation blocks (d values each, components in order)
    followed by the K variance-deviation blocks.  Rows are put in canonical
    (lexicographic) order before accumulation, so any permutation of the
    input produces a bit-identical result.  An empty bag maps to zeros.
    """
    k, d = model.k, model.d
    points = np.asarray(points, dtype=np.float64)
    if points.size == 0:
        return FisherVector(values=np.zeros(2 * d * k), normalized=False)
    points = np.ascontiguousarray(np.atleast_2d(points))
    if points.ndim != 2 or points.shape[1] != d:
        raise ValueError(f"expected points of dimension {d}, got shape {points.shape}")
    n = points.shape[0]

    order = np.lexsort(points.T[::-1])
    points = np.ascontiguousarray(points[order])

    lj = _log_joint_matrix(model, points)
    q = np.exp(lj - np.max(lj, axis=1, keepdims=True))
    q /= q.sum(axis=1, keepdims=True)

    u, v = _kernels.fv_sums(points, np.ascontiguousarray(q), np.ascontiguousarray(model.means),
                            np.ascontiguousarray(model.variances))
    w = model.weights
    safe = w > 0
    u_scale = np.zeros(k)
    v_scale = np.zeros(k)
    u_scale[safe] = 1.0 / (n * np.sqrt(w[safe]))
    v_scale[safe] = 1.0 / (n * np.sqrt(2.0 * w[safe]))
    values = np.concatenate([(u * u_scale[:, None]).ravel(), (v * v_scale[:, None]).ravel()])
    return FisherVector(values=values, normalized=False)


def normalize_fv(fv: FisherVector, alpha: float = 0.5) -> FisherVector:
    """Signed power normalization followed by L2; zero stays zero."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    powered = np.sign(fv.values) * np.abs(fv.values) ** alpha
    norm = np.linalg.norm(powered)
    if norm > 0:
        powered = powered / norm
    return FisherVector(values=powered, normalized=True)


def image_textual_feature(
    proposals,
    selector: ProposalSelector,
    alphabet: Alphabet,
    rule: OccupancyRule,
    pca: PcaModel,
    gmm: GmmModel,
    normalize: bool = False,
    alpha: float = 0.5,
) -> FisherVector:
    """Full per-image textual pipeline: select, embed, project, aggregate."""
    if pca.d != gmm.d:
        raise ValueError(f"pca d={pca.d} does not match mixture d={gmm.d}")
    chosen = select_top_m(proposals, selector)
    phocs = []
    for p in chosen:
        if p.phoc is not None:
            phocs.append(np.asarray(p.phoc, dtype=np.float64))
        else:
            phocs.append(build_phoc(normalize_word(p.text), alphabet, rule).astype(np.float64))
    if phocs:
        # row-by-row so a word's projection never depends on the bag size
        reduced = np.stack([project(pca, row) for row in phocs])
    else:
        reduced = np.zeros((0, gmm.d))
    fv = encode_fv(gmm, reduced)
    if normalize:
        fv = normalize_fv(fv, alpha)
    return fv
