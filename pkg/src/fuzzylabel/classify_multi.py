"""Fuzzy-label ML-KNN for multi-label classification.

Per label ``l`` and query ``x`` with K nearest training neighbors:

* prior ``P(l) = (sum_n u_n^l + s) / (N + 2 s)`` from the *fuzzy* column sums;
* ``count_l`` = neighbors with ``u^l > thr`` and ``countN_l = K - count_l``;
* ``Pc_l = (s + count_l) / (s (K + 1) + sum_l' count_l')`` and likewise for
  ``PcN_l`` with ``countN``, the denominators summing over labels;
* posterior ``P(l) Pc_l / (P(l) Pc_l + (1 - P(l)) PcN_l)``, thresholded with
  ``>= thr``.

Two alternative readings are kept for comparison. ``as_printed=True`` swaps
the membership indicator (``count_l`` counts ``u <= thr``) and uses
``P(l) count_l + (1 - P(l)) PcN_l`` as the posterior denominator.
``conditioning="classic"`` replaces the label-summed likelihoods by the
leave-one-out neighbor-count histograms of the original ML-KNN.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .classify_single import search
from .dataset import Dataset


def fit_priors(train_fuzzy, smoothing: float) -> np.ndarray:
    """Smoothed per-label prior from fuzzy column sums."""
    if not smoothing > 0:
        raise ValueError("smoothing must be positive")
    U = np.asarray(train_fuzzy, dtype=np.float64)
    return (U.sum(axis=0) + smoothing) / (U.shape[0] + 2.0 * smoothing)


def conditional_probabilities(count, count_n, k: int, smoothing: float):
    """Smoothed likelihoods ``(Pc, PcN)`` from per-label neighbor counts.

    ``count``/``count_n`` have labels on the last axis; the denominator sums
    over that axis.
    """
    c = np.asarray(count, dtype=np.float64)
    cn = np.asarray(count_n, dtype=np.float64)
    base = smoothing * (k + 1)
    pc = (smoothing + c) / (base + c.sum(axis=-1, keepdims=True))
    pcn = (smoothing + cn) / (base + cn.sum(axis=-1, keepdims=True))
    return pc, pcn


def bayes_posterior(prior, pc, pcn) -> np.ndarray:
    num = prior * pc
    return num / (num + (1.0 - prior) * pcn)


@dataclass(frozen=True)
class MultiLabelModel:
    train_features: np.ndarray
    train_fuzzy: np.ndarray
    k_neighbors: int = 5
    smoothing: float = 0.05
    threshold: float = 0.5
    as_printed: bool = False
    conditioning: str = "fuzzy"
    priors: np.ndarray = field(init=False, repr=False)
    _classic: tuple | None = field(init=False, repr=False, default=None)

    def __post_init__(self):
        X = np.asarray(self.train_features, dtype=np.float64)
        U = np.asarray(self.train_fuzzy, dtype=np.float64)
        if X.ndim != 2 or U.ndim != 2 or X.shape[0] != U.shape[0]:
            raise ValueError("training features and labels must be 2-D with matching rows")
        if not 1 <= self.k_neighbors <= X.shape[0]:
            raise ValueError(f"k_neighbors must be in [1, {X.shape[0]}], got {self.k_neighbors}")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        if self.conditioning not in ("fuzzy", "classic"):
            raise ValueError(f"unknown conditioning {self.conditioning!r}")
        object.__setattr__(self, "train_features", X)
        object.__setattr__(self, "train_fuzzy", U)
        object.__setattr__(self, "priors", fit_priors(U, self.smoothing))
        if self.conditioning == "classic":
            object.__setattr__(self, "_classic", self._fit_histograms())

    @property
    def label_count(self) -> int:
        return self.train_fuzzy.shape[1]

    def _members(self, values):
        if self.as_printed:
            return values <= self.threshold
        return values > self.threshold

    def _fit_histograms(self):
        X, K, s = self.train_features, self.k_neighbors, self.smoothing
        if K > X.shape[0] - 1:
            raise ValueError("classic conditioning needs k_neighbors < number of training rows")
        sq = _kernels.pairwise_sq_dists(X, X)
        np.fill_diagonal(sq, np.inf)
        idx = _kernels.knn_indices(sq, K)
        member = self._members(self.train_fuzzy)
        delta = member[idx].sum(axis=1)  # (N, L) neighbor member counts
        L = self.label_count
        c1 = np.zeros((L, K + 1))
        c0 = np.zeros((L, K + 1))
        for l in range(L):
            c1[l] = np.bincount(delta[member[:, l], l], minlength=K + 1)
            c0[l] = np.bincount(delta[~member[:, l], l], minlength=K + 1)
        p1 = (s + c1) / (s * (K + 1) + c1.sum(axis=1, keepdims=True))
        p0 = (s + c0) / (s * (K + 1) + c0.sum(axis=1, keepdims=True))
        return p1, p0

    def neighborhood_counts(self, query):
        Q = np.atleast_2d(np.asarray(query, dtype=np.float64))
        idx, _ = search(self.train_features, Q, self.k_neighbors)
        count = self._members(self.train_fuzzy[idx]).sum(axis=1)
        out = (count, self.k_neighbors - count)
        return (out[0][0], out[1][0]) if np.ndim(query) == 1 else out

    def predict_fuzzy(self, query) -> np.ndarray:
        single = np.ndim(query) == 1
        count, count_n = self.neighborhood_counts(np.atleast_2d(query))
        prior = self.priors
        if self.conditioning == "classic":
            p1, p0 = self._classic
            lab = np.arange(self.label_count)
            pc, pcn = p1[lab, count], p0[lab, count]
            post = bayes_posterior(prior, pc, pcn)
        else:
            pc, pcn = conditional_probabilities(count, count_n, self.k_neighbors, self.smoothing)
            if self.as_printed:
                post = prior * pc / (prior * count + (1.0 - prior) * pcn)
            else:
                post = bayes_posterior(prior, pc, pcn)
        return post[0] if single else post

    def predict(self, query) -> np.ndarray:
        return (self.predict_fuzzy(query) >= self.threshold).astype(np.float64)


def neighborhood_counts(model: MultiLabelModel, query):
    """Per-label ``(count, countN)`` over the query's K nearest neighbors."""
    return model.neighborhood_counts(query)


def predict_fuzzy(model: MultiLabelModel, query) -> np.ndarray:
    return model.predict_fuzzy(query)


def predict_logical(model: MultiLabelModel, query) -> np.ndarray:
    return model.predict(query)


def fit_mlknn(train_features, train_fuzzy, k: int = 5, smoothing: float = 0.05, threshold: float = 0.5,
              as_printed: bool = False, conditioning: str = "fuzzy") -> MultiLabelModel:
    return MultiLabelModel(train_features, train_fuzzy, k, smoothing, threshold, as_printed, conditioning)


def fit_baseline_mlknn(train: Dataset, k: int = 5, smoothing: float = 0.05, threshold: float = 0.5,
                       **kwargs) -> MultiLabelModel:
    """ML-KNN baseline: the same model fed the 0/1 logical labels."""
    return MultiLabelModel(train.features, train.logical, k, smoothing, threshold, **kwargs)
