"""Single-label and multi-label evaluation metrics.

Ranking conventions for the multi-label metrics: rank 1 is the highest
score and equal scores are ranked by label index (lower index first).
Ranking loss compares raw scores and counts ties as errors. Instances with
no relevant label (and, for ranking loss, no irrelevant label) are skipped;
pass ``return_skipped=True`` to get the skip count alongside the value.

Lower is better for hamming loss, one-error, ranking loss and coverage;
higher is better for the rest.
"""
from __future__ import annotations

import numpy as np


def _pair(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValueError("empty input")
    return a, b


def accuracy(pred, truth) -> float:
    """Fraction of exact matches (whole rows for 2-D input)."""
    pred, truth = _pair(pred, truth)
    hit = pred == truth
    if hit.ndim > 1:
        hit = hit.all(axis=tuple(range(1, hit.ndim)))
    return float(np.mean(hit))


def _f1(tp, fp, fn):
    den = 2 * tp + fp + fn
    return 0.0 if den == 0 else 2.0 * tp / den


def f1(pred, truth, averaging: str = "binary", positive=1) -> float:
    """F1 score; ``macro`` averages the per-class scores over the classes
    present in ``pred`` or ``truth``. A class with no true positives and no
    predictions scores 0."""
    pred, truth = _pair(pred, truth)
    if averaging == "binary":
        p, t = pred == positive, truth == positive
        return _f1(np.sum(p & t), np.sum(p & ~t), np.sum(~p & t))
    if averaging == "macro":
        classes = np.union1d(pred, truth)
        return float(np.mean([_f1(np.sum((pred == c) & (truth == c)),
                                  np.sum((pred == c) & (truth != c)),
                                  np.sum((pred != c) & (truth == c))) for c in classes]))
    raise ValueError(f"unknown averaging {averaging!r}")


def _average_ranks(x):
    """1-based ranks of ``x`` ascending with ties sharing their mean rank."""
    order = np.argsort(x, kind="stable")
    xs = x[order]
    ranks = np.empty(len(x), dtype=np.float64)
    starts = np.r_[0, np.flatnonzero(np.diff(xs)) + 1]
    ends = np.r_[starts[1:], len(x)]
    for s, e in zip(starts, ends):
        ranks[order[s:e]] = 0.5 * (s + 1 + e)
    return ranks


def roc_auc(scores, truth) -> float | None:
    """Area under the ROC curve (Mann-Whitney statistic, ties count 1/2).

    Returns ``None`` when ``truth`` contains a single class.
    """
    s, t = _pair(np.asarray(scores, dtype=np.float64), np.asarray(truth))
    pos = t.astype(bool)
    n_pos = int(pos.sum())
    n_neg = pos.size - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    r = _average_ranks(s)
    return float((r[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def roc_auc_ovr(score_matrix, classes) -> float | None:
    """Macro one-vs-rest AUC over the classes that have both positives and
    negatives; ``None`` if there are none."""
    S = np.asarray(score_matrix, dtype=np.float64)
    classes = np.asarray(classes)
    aucs = [roc_auc(S[:, c], classes == c) for c in range(S.shape[1])]
    aucs = [a for a in aucs if a is not None]
    return float(np.mean(aucs)) if aucs else None


def hamming_loss(pred, truth) -> float:
    pred, truth = _pair(pred, truth)
    return float(np.mean(pred.astype(bool) != truth.astype(bool)))


def label_ranks(scores) -> np.ndarray:
    """Per-row 1-based ranks, highest score first, ties by label index."""
    S = np.asarray(scores, dtype=np.float64)
    order = np.argsort(-S, axis=1, kind="stable")
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.arange(1, S.shape[1] + 1)[None, :].repeat(S.shape[0], 0), axis=1)
    return ranks


def _ranking_input(scores, truth):
    S, Y = _pair(np.asarray(scores, dtype=np.float64), np.asarray(truth))
    if S.ndim != 2:
        raise ValueError("scores must be a 2-D matrix")
    if not np.all(np.isfinite(S)):
        raise ValueError("scores must be finite")
    return S, Y.astype(bool)


def _finish(values, skipped, return_skipped, name):
    if len(values) == 0:
        raise ValueError(f"{name}: every instance was skipped")
    value = float(np.mean(values))
    return (value, skipped) if return_skipped else value


def average_precision(scores, truth, return_skipped: bool = False):
    S, Y = _ranking_input(scores, truth)
    R = label_ranks(S)
    keep = Y.any(axis=1)
    vals = []
    for r, y in zip(R[keep], Y[keep]):
        rel = r[y]
        # for each relevant label: relevant labels ranked at or above it / its rank
        vals.append(np.mean((rel[None, :] <= rel[:, None]).sum(axis=1) / rel))
    return _finish(vals, int((~keep).sum()), return_skipped, "average_precision")


def one_error(scores, truth, return_skipped: bool = False):
    S, Y = _ranking_input(scores, truth)
    keep = Y.any(axis=1)
    top = np.argmax(S[keep], axis=1)
    vals = ~Y[keep][np.arange(top.size), top]
    return _finish(vals.astype(np.float64), int((~keep).sum()), return_skipped, "one_error")


def ranking_loss(scores, truth, return_skipped: bool = False):
    S, Y = _ranking_input(scores, truth)
    keep = Y.any(axis=1) & (~Y).any(axis=1)
    vals = []
    for s, y in zip(S[keep], Y[keep]):
        rel, irr = s[y], s[~y]
        vals.append(np.mean(rel[:, None] <= irr[None, :]))
    return _finish(vals, int((~keep).sum()), return_skipped, "ranking_loss")


def coverage(scores, truth, return_skipped: bool = False):
    S, Y = _ranking_input(scores, truth)
    R = label_ranks(S)
    keep = Y.any(axis=1)
    vals = np.where(Y[keep], R[keep], 0).max(axis=1) - 1.0
    return _finish(vals, int((~keep).sum()), return_skipped, "coverage")


SINGLE_METRICS = ("accuracy", "f1", "roc_auc")
MULTI_METRICS = ("ap", "hl", "oe", "rl", "cv")
LOWER_IS_BETTER = frozenset({"hl", "oe", "rl", "cv"})


def single_label_report(pred_classes, true_classes, scores, n_classes: int) -> dict:
    """Accuracy, F1 (binary on class 1 for two classes, macro otherwise) and
    ROC-AUC (score of class 1 for two classes, macro one-vs-rest otherwise)."""
    pred_classes = np.asarray(pred_classes)
    true_classes = np.asarray(true_classes)
    scores = np.asarray(scores, dtype=np.float64)
    if n_classes == 2:
        f = f1(pred_classes, true_classes, "binary", positive=1)
        auc = roc_auc(scores[:, 1], true_classes == 1)
    else:
        f = f1(pred_classes, true_classes, "macro")
        auc = roc_auc_ovr(scores, true_classes)
    return {"accuracy": accuracy(pred_classes, true_classes), "f1": f, "roc_auc": auc}


def multi_label_report(pred, truth, scores) -> dict:
    out = {"hl": hamming_loss(pred, truth)}
    for key, fn in (("ap", average_precision), ("oe", one_error), ("rl", ranking_loss), ("cv", coverage)):
        try:
            value, skipped = fn(scores, truth, return_skipped=True)
        except ValueError:
            value, skipped = None, int(np.asarray(truth).shape[0])
        out[key] = value
        out[f"{key}_skipped"] = skipped
    return out
