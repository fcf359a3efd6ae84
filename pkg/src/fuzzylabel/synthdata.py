"""Synthetic Gaussian-cluster datasets with known ("true") fuzzy labels.

Single-label: K clusters with centers uniform in [0, 1]^D and covariance
``phi^2 (I + rho A_k)``. The raw membership of a sample in its own cluster
is the reciprocal distance to the center, other memberships are 0. Raw
reciprocals are unbounded, so each class column is divided by its maximum,
which maps it into (0, 1] and keeps every row's single nonzero entry.

Multi-label: the same samples plus isotropic Gaussian noise of std
``noise_sigma``; membership in every cluster j is
``exp(-||x - c_j||^2 / (2 noise_sigma^2)) + alpha_offset`` clamped to
[0, 1]. Logical labels are the memberships thresholded at 0.5 (``>=``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, LabelMode, fuzzy_to_logical


@dataclass(frozen=True)
class SynthConfig:
    n_total: int = 1500
    k_clusters: int = 3
    dims: int = 5
    phi: float = 0.2
    rho: float = 0.5
    noise_sigma: float = 0.5
    alpha_offset: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        if not self.phi > 0:
            raise ValueError("phi must be positive")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")
        if self.k_clusters < 1 or self.dims < 1 or self.n_total < self.k_clusters:
            raise ValueError("need k_clusters >= 1, dims >= 1 and n_total >= k_clusters")

    @classmethod
    def single_label(cls, **kw) -> "SynthConfig":
        return cls(**{"n_total": 1500, "dims": 5, **kw})

    @classmethod
    def multi_label(cls, **kw) -> "SynthConfig":
        return cls(**{"n_total": 2601, "dims": 3, **kw})


def make_covariance(dims: int, phi: float, rho: float, rng) -> np.ndarray:
    """``phi^2 (I + rho A)`` with ``A = B B^T / ||B B^T||_2``, B standard normal.

    ``A`` is always drawn so the random stream does not depend on ``rho``.
    """
    if dims < 1:
        raise ValueError("dims must be at least 1")
    B = rng.standard_normal((dims, dims))
    A = B @ B.T
    A /= np.linalg.norm(A, 2)
    A = 0.5 * (A + A.T)
    if rho == 0:
        return (phi * phi) * np.eye(dims)
    return (phi * phi) * (np.eye(dims) + rho * A)


def cluster_sizes(n_total: int, k: int) -> np.ndarray:
    """Equal split, remainder to the earliest clusters."""
    sizes = np.full(k, n_total // k)
    sizes[: n_total % k] += 1
    return sizes


def _sample_clusters(config: SynthConfig, rng):
    centers = rng.uniform(0.0, 1.0, size=(config.k_clusters, config.dims))
    sizes = cluster_sizes(config.n_total, config.k_clusters)
    xs, ks = [], []
    for k, n_k in enumerate(sizes):
        cov = make_covariance(config.dims, config.phi, config.rho, rng)
        xs.append(rng.multivariate_normal(centers[k], cov, size=int(n_k), method="cholesky"))
        ks.append(np.full(int(n_k), k))
    return centers, np.vstack(xs), np.concatenate(ks)


def raw_single_membership(x, center) -> float:
    """Reciprocal Euclidean distance; a sample on its center gets ``inf``."""
    d = float(np.linalg.norm(np.asarray(x) - np.asarray(center)))
    return np.inf if d == 0 else 1.0 / d


def gen_single_label(config: SynthConfig = SynthConfig.single_label()) -> Dataset:
    rng = np.random.default_rng(config.seed)
    centers, X, k = _sample_clusters(config, rng)
    n, K = X.shape[0], config.k_clusters
    d = np.linalg.norm(X - centers[k], axis=1)
    raw = np.full(n, np.inf)
    np.divide(1.0, d, out=raw, where=d > 0)
    U = np.zeros((n, K))
    for c in range(K):
        col = raw[k == c]
        finite = col[np.isfinite(col)]
        top = finite.max() if finite.size else 1.0
        # a sample sitting on its center is capped at membership 1
        U[k == c, c] = np.where(np.isfinite(col), col / top, 1.0)
    Y = np.zeros((n, K))
    Y[np.arange(n), k] = 1.0
    return Dataset(X, Y, LabelMode.SINGLE, np.clip(U, 0.0, 1.0), "synthetic-single",
                   tuple(f"c{c}" for c in range(K)))


def multi_membership(points, centers, sigma: float, alpha_offset: float) -> np.ndarray:
    """``exp(-||x - c_j||^2 / (2 sigma^2)) + alpha_offset`` clamped to [0, 1]."""
    X = np.atleast_2d(np.asarray(points, dtype=np.float64))
    C = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    sq = ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)
    return np.clip(np.exp(-sq / (2.0 * sigma ** 2)) + alpha_offset, 0.0, 1.0)


def gen_multi_label(config: SynthConfig = SynthConfig.multi_label()) -> Dataset:
    if config.noise_sigma == 0:
        raise ValueError("multi-label memberships need noise_sigma > 0 (it is also the kernel width)")
    rng = np.random.default_rng(config.seed)
    centers, X, _ = _sample_clusters(config, rng)
    Xn = X + config.noise_sigma * rng.standard_normal(X.shape)
    U = multi_membership(Xn, centers, config.noise_sigma, config.alpha_offset)
    Y = fuzzy_to_logical(U, LabelMode.MULTI, 0.5)
    return Dataset(Xn, Y, LabelMode.MULTI, U, "synthetic-multi",
                   tuple(f"c{c}" for c in range(config.k_clusters)))
