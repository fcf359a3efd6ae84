"""Similarity graph construction and the normalized propagation matrix.

The cluster-weighted weights ``w_ij = f(x_i, x_j) * m_j[k_i]`` are not
symmetric in general; by default they are averaged with their transpose
before normalization so that the propagation matrix stays symmetric with
spectrum in [-1, 1].
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels


@dataclass(frozen=True)
class GraphConfig:
    """``kernel_sigma`` is ``"median"`` or a positive float; ``knn`` keeps
    only each vertex's ``knn`` strongest edges (None = fully connected)."""

    kernel_sigma: float | str = "median"
    knn: int | None = None
    symmetrize: bool = True
    normalization: str = "symmetric"


@dataclass(frozen=True)
class WeightGraph:
    weights: np.ndarray
    degree: np.ndarray
    propagation: np.ndarray
    kernel_sigma: float | None = None
    normalization: str = "symmetric"

    @property
    def n(self) -> int:
        return self.weights.shape[0]


def median_bandwidth(features) -> float:
    """Median Euclidean distance over all distinct pairs of rows.

    Falls back to 1.0 when every pair coincides.
    """
    X = np.asarray(features, dtype=np.float64)
    n = X.shape[0]
    if n < 2:
        return 1.0
    sq = _kernels.pairwise_sq_dists(X, X)
    d = np.sqrt(sq[np.triu_indices(n, k=1)])
    med = float(np.median(d))
    return med if med > 0 else 1.0


def resolve_sigma(features, sigma) -> float:
    if isinstance(sigma, str):
        if sigma != "median":
            return resolve_sigma(features, float(sigma))
        return median_bandwidth(features)
    sigma = float(sigma)
    if not sigma > 0:
        raise ValueError(f"kernel bandwidth must be positive, got {sigma}")
    return sigma


def gaussian_similarity(features, sigma: float) -> np.ndarray:
    """``exp(-||x_i - x_j||^2 / (2 sigma^2))`` off the diagonal, 0 on it."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    X = np.asarray(features, dtype=np.float64)
    sq = _kernels.pairwise_sq_dists(X, X)
    W = np.exp(-np.maximum(sq, 0.0) / (2.0 * sigma * sigma))
    np.fill_diagonal(W, 0.0)
    return W


def cluster_weighted_similarity(base, membership, dominant) -> np.ndarray:
    """Scale ``base[i, j]`` by the membership of ``j`` in ``i``'s dominant cluster."""
    base = np.asarray(base, dtype=np.float64)
    M = np.asarray(membership, dtype=np.float64)
    dominant = np.asarray(dominant)
    n = base.shape[0]
    if base.shape != (n, n) or M.shape[0] != n or dominant.shape != (n,):
        raise ValueError("shape mismatch between similarity, membership and dominant clusters")
    # M[:, dominant][j, i] == m_j^{k_i}
    return base * M[:, dominant].T


def symmetrize(W) -> np.ndarray:
    W = np.asarray(W, dtype=np.float64)
    return 0.5 * (W + W.T)


def knn_sparsify(W, k: int) -> np.ndarray:
    """Keep, per row, the ``k`` largest off-diagonal weights; an edge survives
    if either endpoint keeps it."""
    W = np.asarray(W, dtype=np.float64)
    n = W.shape[0]
    if k >= n - 1:
        return W.copy()
    if k < 1:
        raise ValueError("knn must be at least 1")
    score = -W.copy()
    np.fill_diagonal(score, np.inf)
    idx = _kernels.knn_indices(score, k)
    keep = np.zeros_like(W, dtype=bool)
    keep[np.repeat(np.arange(n), k), idx.ravel()] = True
    keep |= keep.T
    return np.where(keep, W, 0.0)


def build_propagation(weights, normalization: str = "symmetric",
                      kernel_sigma: float | None = None) -> WeightGraph:
    """Degree-normalize ``weights`` into a propagation matrix.

    ``symmetric``: ``D^-1/2 W D^-1/2``; ``row``: ``D^-1 W``. Degrees are row
    sums. Zero-degree vertices get zero rows and columns.
    """
    W = np.array(weights, dtype=np.float64, copy=True)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ValueError("weights must be a square matrix")
    if np.any(W < 0):
        raise ValueError("weights must be nonnegative")
    if np.any(np.diag(W) != 0):
        raise ValueError("weights must have a zero diagonal")
    if not np.any(W > 0):
        raise ValueError("weight matrix is all zero: no graph structure")
    deg = W.sum(axis=1)
    inv = np.zeros_like(deg)
    nz = deg > 0
    if normalization == "symmetric":
        inv[nz] = 1.0 / np.sqrt(deg[nz])
        P = inv[:, None] * W * inv[None, :]
    elif normalization == "row":
        inv[nz] = 1.0 / deg[nz]
        P = inv[:, None] * W
        P[:, ~nz] = 0.0
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    for a in (W, deg, P):
        a.setflags(write=False)
    return WeightGraph(W, deg, P, kernel_sigma, normalization)


def build_graph(features, membership, config: GraphConfig = GraphConfig()) -> WeightGraph:
    """Full pipeline: Gaussian similarity, cluster weighting, optional
    symmetrization and sparsification, normalization."""
    from .fcm import dominant_cluster

    sigma = resolve_sigma(features, config.kernel_sigma)
    base = gaussian_similarity(features, sigma)
    W = cluster_weighted_similarity(base, membership, dominant_cluster(membership))
    if config.symmetrize:
        W = symmetrize(W)
    if config.knn is not None:
        W = knn_sparsify(W, config.knn)
    return build_propagation(W, config.normalization, sigma)
