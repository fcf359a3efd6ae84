"""Fuzzy-label KNN for single-label classification, plus a hard-vote KNN.

The fuzzy-label predictor averages the neighbors' fuzzy label rows with
weights ``1 / (d + eps)`` and predicts the column with the largest value.
Fed one-hot labels it is ordinary distance-weighted (soft voting) KNN.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels


def _queries(model, query):
    Q = np.asarray(query, dtype=np.float64)
    single = Q.ndim == 1
    Q = np.atleast_2d(Q)
    if Q.shape[1] != model.train_features.shape[1]:
        raise ValueError(f"query has {Q.shape[1]} features, model expects {model.train_features.shape[1]}")
    return Q, single


def search(train_features, queries, k: int):
    """K nearest training rows per query: ``(indices, distances)``, ascending,
    equal distances ordered by training index."""
    sq = _kernels.pairwise_sq_dists(queries, train_features)
    idx = _kernels.knn_indices(sq, k)
    dist = np.sqrt(np.take_along_axis(sq, idx, axis=1))
    return idx, dist


@dataclass(frozen=True)
class SingleLabelModel:
    train_features: np.ndarray
    train_fuzzy: np.ndarray
    k_neighbors: int = 5
    epsilon: float = 1e-10

    def __post_init__(self):
        X = np.asarray(self.train_features, dtype=np.float64)
        U = np.asarray(self.train_fuzzy, dtype=np.float64)
        if X.ndim != 2 or U.ndim != 2 or X.shape[0] != U.shape[0]:
            raise ValueError("training features and labels must be 2-D with matching rows")
        if not 1 <= self.k_neighbors <= X.shape[0]:
            raise ValueError(f"k_neighbors must be in [1, {X.shape[0]}], got {self.k_neighbors}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        object.__setattr__(self, "train_features", X)
        object.__setattr__(self, "train_fuzzy", U)

    def neighbors(self, query):
        Q, single = _queries(self, query)
        idx, dist = search(self.train_features, Q, self.k_neighbors)
        return (idx[0], dist[0]) if single else (idx, dist)

    def predict_fuzzy(self, query) -> np.ndarray:
        Q, single = _queries(self, query)
        idx, dist = search(self.train_features, Q, self.k_neighbors)
        w = 1.0 / (dist + self.epsilon)
        w /= w.sum(axis=1, keepdims=True)
        out = np.einsum("qk,qkl->ql", w, self.train_fuzzy[idx])
        return out[0] if single else out

    def predict(self, query) -> np.ndarray:
        return np.argmax(self.predict_fuzzy(query), axis=-1)


def neighbor_search(model: SingleLabelModel, query):
    """Indices and distances of the ``k`` nearest training points to ``query``."""
    return model.neighbors(query)


def predict_fuzzy(model: SingleLabelModel, query) -> np.ndarray:
    return model.predict_fuzzy(query)


def predict_class(model: SingleLabelModel, query):
    """Class index with the largest aggregated membership (lowest index on ties)."""
    return model.predict(query)


@dataclass(frozen=True)
class MajorityKNN:
    """Classic unweighted majority-vote KNN; vote ties go to the lowest class."""

    train_features: np.ndarray
    train_classes: np.ndarray
    n_classes: int
    k_neighbors: int = 5

    def __post_init__(self):
        object.__setattr__(self, "train_features", np.asarray(self.train_features, dtype=np.float64))
        object.__setattr__(self, "train_classes", np.asarray(self.train_classes, dtype=np.intp))
        if not 1 <= self.k_neighbors <= self.train_features.shape[0]:
            raise ValueError("k_neighbors out of range")

    def predict_scores(self, query) -> np.ndarray:
        """Vote fractions per class."""
        Q, single = _queries(self, query)
        idx, _ = search(self.train_features, Q, self.k_neighbors)
        votes = np.zeros((Q.shape[0], self.n_classes))
        np.add.at(votes, (np.repeat(np.arange(Q.shape[0]), self.k_neighbors), self.train_classes[idx].ravel()), 1.0)
        votes /= self.k_neighbors
        return votes[0] if single else votes

    def predict(self, query) -> np.ndarray:
        return np.argmax(self.predict_scores(query), axis=-1)
