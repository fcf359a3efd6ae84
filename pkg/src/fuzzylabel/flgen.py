"""Fuzzy label generation by cluster-weighted label propagation.

Pipeline: fuzzy C-means memberships -> cluster-weighted Gaussian graph ->
normalized propagation matrix P -> iterate ``U <- a P U + (1 - a) Y`` from
``U = Y`` until the max-norm change drops below ``tol``.

Column-wise min-max rescaling of the result is deliberately not applied:
it would move the fixed point. Clipping to [0, 1] is applied instead, which
keeps rows free of any sum constraint.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .dataset import Dataset
from .fcm import FcmConfig, FcmResult, fcm_fit
from .graph import GraphConfig, WeightGraph, build_graph


class ConvergenceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PropagationConfig:
    alpha: float = 0.5
    tol: float = 1e-6
    max_iter: int = 1000
    clip: bool = True

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True)
class GenerationResult:
    fuzzy: np.ndarray
    iterations: int
    converged: bool
    last_change: float
    graph: WeightGraph | None = None
    clusters: FcmResult | None = None


def _matrix(graph_or_p):
    return graph_or_p.propagation if isinstance(graph_or_p, WeightGraph) else np.asarray(graph_or_p, dtype=np.float64)


def propagate_step(graph, u_prev, y, alpha: float) -> np.ndarray:
    """One application of ``U <- alpha P U_prev + (1 - alpha) Y``."""
    P = _matrix(graph)
    return alpha * (P @ np.asarray(u_prev, dtype=np.float64)) + (1.0 - alpha) * np.asarray(y, dtype=np.float64)


def propagate(graph, y, config: PropagationConfig = PropagationConfig()) -> GenerationResult:
    """Iterate the propagation update to convergence on an existing graph."""
    Y = np.asarray(y, dtype=np.float64)
    P = _matrix(graph)
    if P.shape != (Y.shape[0], Y.shape[0]):
        raise ValueError(f"propagation matrix {P.shape} does not match {Y.shape[0]} labels rows")
    U, iters, change = _kernels.propagate(P, Y, config.alpha, config.tol, config.max_iter)
    converged = change < config.tol
    if not converged:
        warnings.warn(f"label propagation stopped after {iters} iterations with change "
                      f"{change:.3g} >= tol {config.tol:.3g}", ConvergenceWarning, stacklevel=2)
    if config.clip:
        U = np.clip(U, 0.0, 1.0)
    return GenerationResult(U, iters, converged, float(change),
                            graph if isinstance(graph, WeightGraph) else None)


def fixed_point_oracle(graph, y, alpha: float) -> np.ndarray:
    """Closed-form fixed point ``(1 - alpha) (I - alpha P)^-1 Y`` by a dense solve."""
    P = _matrix(graph)
    n = P.shape[0]
    if n > 2000:
        raise ValueError("dense fixed-point solve limited to N <= 2000")
    A = np.eye(n) - alpha * P
    try:
        return (1.0 - alpha) * np.linalg.solve(A, np.asarray(y, dtype=np.float64))
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"singular propagation system: {exc}") from None


def flgen_lp(features, logical=None, fcm_config: FcmConfig = FcmConfig(),
             graph_config: GraphConfig = GraphConfig(),
             prop_config: PropagationConfig = PropagationConfig()) -> GenerationResult:
    """Generate fuzzy labels for the rows of ``features`` from ``logical``.

    ``features`` may also be a :class:`Dataset`, in which case ``logical`` is
    ignored and taken from it. Output rows align with the input rows.
    """
    if isinstance(features, Dataset):
        X, Y = features.features, features.logical
    else:
        if logical is None:
            raise ValueError("logical labels are required unless a Dataset is given")
        X = np.asarray(features, dtype=np.float64)
        Y = np.asarray(logical, dtype=np.float64)
    if X.shape[0] != Y.shape[0]:
        raise ValueError("features and labels differ in row count")
    k = fcm_config.k if fcm_config.k is not None else Y.shape[1]
    k = min(k, X.shape[0])
    clusters = fcm_fit(X, k, fcm_config.fuzzifier, fcm_config.tol, fcm_config.max_iter, fcm_config.seed)
    graph = build_graph(X, clusters.membership, graph_config)
    res = propagate(graph, Y, prop_config)
    return GenerationResult(res.fuzzy, res.iterations, res.converged, res.last_change, graph, clusters)


class FLGenLP:
    """Callable soft-label generator ``(features, logical, seed=None) -> fuzzy``.

    This is the interface the experiment harness accepts; any other label
    enhancement method with the same call signature can be swapped in.
    ``seed`` overrides the FCM initialization seed.
    """

    name = "flgen_lp"

    def __init__(self, fcm_config: FcmConfig = FcmConfig(), graph_config: GraphConfig = GraphConfig(),
                 prop_config: PropagationConfig = PropagationConfig()):
        self.fcm_config = fcm_config
        self.graph_config = graph_config
        self.prop_config = prop_config

    def __call__(self, features, logical, seed: int | None = None) -> np.ndarray:
        fcm_config = self.fcm_config if seed is None else replace(self.fcm_config, seed=int(seed))
        return flgen_lp(features, logical, fcm_config, self.graph_config, self.prop_config).fuzzy

    def params(self) -> dict:
        return {
            "alpha": self.prop_config.alpha,
            "tol": self.prop_config.tol,
            "max_iter": self.prop_config.max_iter,
            "clip": self.prop_config.clip,
            "fcm_k": self.fcm_config.k,
            "fcm_m": self.fcm_config.fuzzifier,
            "fcm_tol": self.fcm_config.tol,
            "fcm_seed": self.fcm_config.seed,
            "kernel_sigma": self.graph_config.kernel_sigma,
            "graph_knn": self.graph_config.knn,
            "symmetrize": self.graph_config.symmetrize,
            "normalization": self.graph_config.normalization,
        }
