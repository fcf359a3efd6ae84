"""Fuzzy C-means clustering."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels


@dataclass(frozen=True)
class FcmConfig:
    """FCM settings; ``k=None`` means "one cluster per label"."""

    k: int | None = None
    fuzzifier: float = 2.0
    tol: float = 1e-5
    max_iter: int = 300
    seed: int = 0


@dataclass(frozen=True)
class FcmResult:
    centers: np.ndarray
    membership: np.ndarray
    iterations: int
    final_objective: float
    objective_history: tuple = field(default=(), repr=False)
    converged: bool = True


def _objective(membership, sq_dist, m):
    return float(np.sum((membership ** m) * sq_dist))


def fcm_fit(features, k: int, fuzzifier: float = 2.0, tol: float = 1e-5,
            max_iter: int = 300, seed: int = 0) -> FcmResult:
    """Cluster ``features`` into ``k`` fuzzy clusters.

    Starts from a random row-normalized membership matrix and alternates
    center and membership updates until the largest membership change is
    below ``tol`` or ``max_iter`` updates have run. The objective
    ``sum(u**m * d**2)`` is recorded after each membership update and is
    non-increasing.
    """
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.size == 0:
        raise ValueError("features must be a non-empty 2-D array")
    n = X.shape[0]
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of instances ({n})")
    if fuzzifier <= 1.0:
        raise ValueError("fuzzifier must be > 1")

    rng = np.random.default_rng(seed)
    U = rng.random((n, k))
    U /= U.sum(axis=1, keepdims=True)
    history = []
    converged = False
    it = 0
    centers = None
    for it in range(1, max_iter + 1):
        w = U ** fuzzifier
        centers = (w.T @ X) / w.sum(axis=0)[:, None]
        sq = _kernels.pairwise_sq_dists(X, centers)
        new = _kernels.fcm_memberships(sq, fuzzifier)
        history.append(_objective(new, sq, fuzzifier))
        change = float(np.max(np.abs(new - U)))
        U = new
        if change < tol:
            converged = True
            break
    if centers is None:  # max_iter == 0
        w = U ** fuzzifier
        centers = (w.T @ X) / w.sum(axis=0)[:, None]
        history.append(_objective(U, _kernels.pairwise_sq_dists(X, centers), fuzzifier))
    return FcmResult(centers, U, it, history[-1], tuple(history), converged)


def dominant_cluster(membership) -> np.ndarray:
    """Index of the highest-membership cluster per row (lowest index on ties)."""
    return np.argmax(np.asarray(membership), axis=1)
