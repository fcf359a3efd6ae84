"""Cross-validated experiments: three-arm label comparisons and baseline
versus fuzzy-label classifier comparisons over parameter grids.

Every experiment is a set of cells, one per (method, fold, parameter
setting). A method is either a training-label arm (``true_logical``,
``true_fuzzy``, ``generated_fuzzy``) or, in a comparison, ``baseline`` /
``flel``. Test labels are always the true logical labels.

Features are standardized per training fold and generated fuzzy labels
are computed from the training fold only. All randomness comes from the
plan seed: folds use it directly and the generator of fold ``f`` gets a
seed derived from ``(seed, f)``, so serial and threaded runs agree.

Wall-clock timings are kept on the report but written to their own files,
which leaves ``report.json`` and the CSV outputs byte-deterministic.
"""
from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .classify_multi import MultiLabelModel
from .classify_single import MajorityKNN, SingleLabelModel
from .dataset import Dataset, FoldSplit, LabelMode, kfold_split, standardize
from .flgen import FLGenLP
from .metrics import LOWER_IS_BETTER, MULTI_METRICS, SINGLE_METRICS, multi_label_report, single_label_report

SCHEMA_VERSION = 1

ARMS = ("true_logical", "true_fuzzy", "generated_fuzzy")
METHODS = ("baseline", "flel")
SINGLE_K_GRID = (1, 3, 5, 7, 9, 11, 13)
MULTI_K_GRID = (1, 3, 5, 7, 9, 13)
SMOOTH_GRID = (0.01, 0.03, 0.05, 0.07, 0.09)
TIMING_KEYS = ("generation", "training", "prediction")


class PlanError(ValueError):
    """An experiment plan that cannot be run as specified."""


@dataclass(frozen=True)
class ClassifierSettings:
    epsilon: float = 1e-10
    threshold: float = 0.5
    as_printed: bool = False
    conditioning: str = "fuzzy"
    baseline: str = "majority"  # single-label comparison baseline: majority | soft

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "threshold": self.threshold, "as_printed": self.as_printed,
                "conditioning": self.conditioning, "baseline": self.baseline}


@dataclass(frozen=True)
class ExperimentPlan:
    dataset: Dataset
    arms: tuple = ARMS
    k_grid: tuple | None = None
    smooth_grid: tuple = (0.05,)
    fold_count: int = 5
    seed: int = 0
    folds: FoldSplit | None = None
    generator: Callable = field(default_factory=FLGenLP)
    standardize: bool = True
    classifier: ClassifierSettings = ClassifierSettings()
    jobs: int = 1

    @property
    def mode(self) -> LabelMode:
        return self.dataset.mode

    @property
    def ks(self) -> tuple:
        if self.k_grid is not None:
            return tuple(int(k) for k in self.k_grid)
        return SINGLE_K_GRID if self.mode is LabelMode.SINGLE else MULTI_K_GRID

    def param_grid(self) -> list[dict]:
        if self.mode is LabelMode.SINGLE:
            return [{"k": k} for k in self.ks]
        return [{"k": k, "smoothing": float(s)} for k in self.ks for s in self.smooth_grid]

    def split(self) -> FoldSplit:
        if self.folds is not None:
            return self.folds
        classes = self.dataset.class_indices() if self.mode is LabelMode.SINGLE else None
        return kfold_split(self.dataset.n_samples, self.fold_count, self.seed, classes)

    def fold_seed(self, fold: int) -> int:
        return int(np.random.SeedSequence([int(self.seed), int(fold)]).generate_state(1)[0])

    def validate(self, allowed=ARMS) -> FoldSplit:
        """Raise :class:`PlanError` for an unrunnable plan; return the folds."""
        if not self.arms:
            raise PlanError("no arms selected")
        unknown = [a for a in self.arms if a not in allowed]
        if unknown or len(set(self.arms)) != len(self.arms):
            raise PlanError(f"invalid arms {list(self.arms)}; choose from {list(allowed)}")
        if "true_fuzzy" in self.arms and self.dataset.fuzzy is None:
            raise PlanError("the true_fuzzy arm needs a dataset with true fuzzy labels")
        if not self.ks:
            raise PlanError("K grid is empty")
        if self.mode is LabelMode.MULTI:
            if not self.smooth_grid:
                raise PlanError("smoothing grid is empty")
            if any(not s > 0 for s in self.smooth_grid):
                raise PlanError("smoothing values must be positive")
        if self.seed < 0:
            raise PlanError("seed must be nonnegative")
        if self.jobs < 1:
            raise PlanError("jobs must be at least 1")
        c = self.classifier
        if not c.epsilon > 0:
            raise PlanError("epsilon must be positive")
        if not 0.0 < c.threshold < 1.0:
            raise PlanError("threshold must lie in (0, 1)")
        if c.conditioning not in ("fuzzy", "classic"):
            raise PlanError(f"unknown conditioning {c.conditioning!r}")
        if c.baseline not in ("majority", "soft"):
            raise PlanError(f"unknown baseline {c.baseline!r}")
        try:
            folds = self.split()
        except ValueError as exc:
            raise PlanError(str(exc)) from None
        if folds.assignments.shape != (self.dataset.n_samples,):
            raise PlanError("fold assignments do not match the dataset")
        min_train = int(self.dataset.n_samples - folds.sizes().max())
        limit = min_train - 1 if c.conditioning == "classic" and self.mode is LabelMode.MULTI else min_train
        if min(self.ks) < 1 or max(self.ks) > limit:
            raise PlanError(f"K values must lie in [1, {limit}] for this split, got {list(self.ks)}")
        return folds

    def describe(self) -> dict:
        gen = self.generator
        return {
            "arms": list(self.arms),
            "k_grid": list(self.ks),
            "smooth_grid": [float(s) for s in self.smooth_grid] if self.mode is LabelMode.MULTI else [],
            "fold_count": int(self.split().fold_count),
            "seed": int(self.seed),
            "standardize": bool(self.standardize),
            "classifier": self.classifier.to_dict(),
            "generator": {"name": getattr(gen, "name", type(gen).__name__),
                          "params": gen.params() if hasattr(gen, "params") else {}},
        }


@dataclass
class Cell:
    method: str
    fold: int
    params: dict
    status: str = "ok"
    reason: str | None = None
    metrics: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"method": self.method, "fold": self.fold, "params": dict(self.params), "status": self.status,
                "reason": self.reason, "metrics": dict(self.metrics)}


@dataclass
class ExperimentReport:
    kind: str
    dataset: dict
    plan: dict
    cells: list
    grid_summary: list
    best: dict
    timings: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    @property
    def methods(self) -> list[str]:
        return list(self.plan["arms"])

    @property
    def selection_metric(self) -> str:
        return "accuracy" if self.dataset["mode"] == LabelMode.SINGLE.value else "ap"

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "kind": self.kind,
            "dataset": self.dataset,
            "plan": self.plan,
            "cells": [c.to_dict() for c in self.cells],
            "grid_summary": self.grid_summary,
            "best": self.best,
        }

    def find(self, method: str, fold: int | None = None, **params) -> list:
        return [c for c in self.cells if c.method == method and (fold is None or c.fold == fold)
                and all(c.params.get(k) == v for k, v in params.items())]

    def best_mean(self, method: str, metric: str):
        return self.best[method]["mean"][metric]


# ------------------------------------------------------------ evaluation

def _metric_keys(mode: LabelMode) -> tuple:
    return SINGLE_METRICS if mode is LabelMode.SINGLE else MULTI_METRICS


def _fit_predict(plan: ExperimentPlan, method: str, Xtr, labels, Xte, params):
    """Return (scores, decisions, train_seconds, predict_seconds)."""
    c = plan.classifier
    k = params["k"]
    t0 = time.perf_counter()
    if plan.mode is LabelMode.SINGLE:
        if method == "baseline" and c.baseline == "majority":
            model = MajorityKNN(Xtr, np.argmax(labels, axis=1), labels.shape[1], k)
            t1 = time.perf_counter()
            scores = model.predict_scores(Xte)
        else:
            model = SingleLabelModel(Xtr, labels, k, c.epsilon)
            t1 = time.perf_counter()
            scores = model.predict_fuzzy(Xte)
        decisions = np.argmax(scores, axis=1)
    else:
        model = MultiLabelModel(Xtr, labels, k, params["smoothing"], c.threshold, c.as_printed, c.conditioning)
        t1 = time.perf_counter()
        scores = model.predict_fuzzy(Xte)
        decisions = (scores >= c.threshold).astype(np.float64)
    t2 = time.perf_counter()
    return scores, decisions, t1 - t0, t2 - t1


def _score(plan: ExperimentPlan, scores, decisions, test_idx) -> dict:
    ds = plan.dataset
    if plan.mode is LabelMode.SINGLE:
        truth = ds.class_indices()[test_idx]
        return single_label_report(decisions, truth, scores, ds.n_labels)
    return multi_label_report(decisions, ds.logical[test_idx], scores)


def fold_features(plan: ExperimentPlan, train, test):
    X = plan.dataset.features
    if not plan.standardize:
        return np.array(X[train]), np.array(X[test])
    Xtr, params = standardize(X[train])
    return Xtr, params.transform(X[test])


def training_labels(plan: ExperimentPlan, method: str, Xtr, train, fold: int):
    """Training labels for ``method`` on one fold and the seconds spent making them."""
    ds = plan.dataset
    if method in ("true_logical", "baseline"):
        return np.array(ds.logical[train]), 0.0
    if method == "true_fuzzy":
        return np.array(ds.fuzzy[train]), 0.0
    t0 = time.perf_counter()
    U = np.asarray(plan.generator(Xtr, np.array(ds.logical[train]), seed=plan.fold_seed(fold)), dtype=np.float64)
    elapsed = time.perf_counter() - t0
    if U.shape != (len(train), ds.n_labels):
        raise ValueError(f"generator returned shape {U.shape}, expected {(len(train), ds.n_labels)}")
    return U, elapsed


def _run_fold(plan: ExperimentPlan, folds: FoldSplit, fold: int) -> list:
    train, test = folds.train_test(fold)
    Xtr, Xte = fold_features(plan, train, test)
    cells = []
    for method in plan.arms:
        try:
            labels, gen_time = training_labels(plan, method, Xtr, train, fold)
            gen_error = None
        except Exception as exc:  # the cells of this arm are marked failed
            labels, gen_time, gen_error = None, 0.0, f"label generation failed: {exc}"
        for params in plan.param_grid():
            cell = Cell(method, fold, dict(params))
            if gen_error is not None:
                cell.status, cell.reason = "failed", gen_error
                cells.append(cell)
                continue
            try:
                scores, decisions, t_train, t_pred = _fit_predict(plan, method, Xtr, labels, Xte, params)
                cell.metrics = _score(plan, scores, decisions, test)
                cell.timings = {"generation": gen_time, "training": t_train, "prediction": t_pred}
            except Exception as exc:
                cell.status, cell.reason = "failed", f"{type(exc).__name__}: {exc}"
            cells.append(cell)
    return cells


def _warm_up(plan: ExperimentPlan, folds: FoldSplit):
    """Exercise every code path once on a small slice; nothing is recorded."""
    train, test = folds.train_test(0)
    Xtr, Xte = fold_features(plan, train, test)
    m = min(len(train), max(2 * plan.dataset.n_labels, 16))
    params = plan.param_grid()[0]
    for method in plan.arms:
        try:
            labels, _ = training_labels(plan, method, Xtr[:m], train[:m], 0)
            _fit_predict(plan, method, Xtr[:m], labels, Xte[:4], {**params, "k": min(params["k"], m)})
        except Exception:
            pass


# ------------------------------------------------------------ aggregation

def _mean_std(values):
    vals = [float(v) for v in values if v is not None]
    if not vals:
        return None, None
    a = np.asarray(vals)
    std = float(a.std(ddof=1)) if a.size > 1 else 0.0
    return float(a.mean()), std


def summarize(cells, methods, grid, mode: LabelMode):
    """Per (method, parameter setting) mean and sample std over folds, and
    the best setting per method by mean Accuracy (single) or AP (multi);
    ties keep the earliest grid entry."""
    keys = _metric_keys(mode)
    select = "accuracy" if mode is LabelMode.SINGLE else "ap"
    summary, best = [], {}
    for method in methods:
        top = None
        for params in grid:
            group = [c for c in cells if c.method == method and c.params == params]
            ok = [c for c in group if c.status == "ok"]
            mean, std = {}, {}
            for key in keys:
                mean[key], std[key] = _mean_std(c.metrics.get(key) for c in ok)
            row = {"method": method, "params": dict(params), "folds_ok": len(ok),
                   "folds_failed": len(group) - len(ok), "mean": mean, "std": std}
            summary.append(row)
            if mean[select] is not None and (top is None or mean[select] > top["mean"][select]):
                top = row
        best[method] = ({"params": top["params"], "selected_by": select, "mean": top["mean"], "std": top["std"]}
                        if top is not None else {"params": None, "selected_by": select, "mean": None,
                                                 "std": None, "reason": "no successful cells"})
    return summary, best


def timing_summary(cells, methods) -> dict:
    """Seconds per method: label generation (once per fold), training and
    prediction (summed over every grid cell)."""
    out = {}
    for method in methods:
        ok = [c for c in cells if c.method == method and c.status == "ok"]
        gen = {c.fold: c.timings["generation"] for c in ok}
        out[method] = {
            "generation": float(sum(gen.values())),
            "training": float(sum(c.timings["training"] for c in ok)),
            "prediction": float(sum(c.timings["prediction"] for c in ok)),
        }
        out[method]["generation_plus_prediction"] = out[method]["generation"] + out[method]["prediction"]
    return out


def _execute(plan: ExperimentPlan, kind: str, allowed) -> ExperimentReport:
    folds = plan.validate(allowed)
    _warm_up(plan, folds)
    fold_ids = range(folds.fold_count)
    if plan.jobs > 1:
        with ThreadPoolExecutor(plan.jobs) as pool:
            per_fold = list(pool.map(lambda f: _run_fold(plan, folds, f), fold_ids))
    else:
        per_fold = [_run_fold(plan, folds, f) for f in fold_ids]
    cells = [c for group in per_fold for c in group]
    grid = plan.param_grid()
    summary, best = summarize(cells, plan.arms, grid, plan.mode)
    ds = plan.dataset
    return ExperimentReport(
        kind=kind,
        dataset={"name": ds.name, "mode": ds.mode.value, "n_samples": ds.n_samples,
                 "n_features": ds.n_features, "n_labels": ds.n_labels, "label_names": list(ds.label_names)},
        plan=plan.describe(),
        cells=cells,
        grid_summary=summary,
        best=best,
        timings={"cells": [{"method": c.method, "fold": c.fold, "params": c.params, **c.timings}
                           for c in cells if c.status == "ok"],
                 "totals": timing_summary(cells, plan.arms)},
    )


def run_three_arm(plan: ExperimentPlan) -> ExperimentReport:
    """Train on true logical, true fuzzy and/or generated fuzzy labels and
    evaluate every arm against the true logical test labels."""
    return _execute(plan, "three_arm", ARMS)


def run_comparison(dataset: Dataset, mode=None, grids: dict | None = None, folds=5, seed: int = 0,
                   generator: Callable | None = None, classifier: ClassifierSettings = ClassifierSettings(),
                   standardize: bool = True, jobs: int = 1) -> ExperimentReport:
    """Baseline classifier versus the fuzzy-label classifier trained on
    generated labels, over the K grid (and smoothing grid in multi mode).

    ``grids`` may hold ``"k"`` and ``"smoothing"`` sequences; missing
    entries fall back to the default grids for the mode. ``folds`` is a
    fold count or a :class:`FoldSplit`.
    """
    if mode is not None and LabelMode.parse(mode) is not dataset.mode:
        raise PlanError(f"dataset is {dataset.mode.value} but mode {mode} was requested")
    grids = dict(grids or {})
    k_grid = grids.get("k")
    if k_grid is not None and len(k_grid) == 0:
        raise PlanError("K grid is empty")
    smooth = tuple(grids.get("smoothing", SMOOTH_GRID))
    plan = ExperimentPlan(
        dataset=dataset, arms=METHODS, k_grid=None if k_grid is None else tuple(k_grid), smooth_grid=smooth,
        fold_count=folds if isinstance(folds, int) else folds.fold_count,
        folds=None if isinstance(folds, int) else folds, seed=seed,
        generator=generator if generator is not None else FLGenLP(), standardize=standardize,
        classifier=classifier, jobs=jobs,
    )
    return _execute(plan, "comparison", METHODS)


# ---------------------------------------------------------------- output

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def _write_csv(path: Path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows([[_fmt(v) for v in row] for row in rows])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def _write_json(path: Path, obj):
    try:
        path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def _report_metric_keys(report: ExperimentReport) -> tuple:
    return _metric_keys(LabelMode.parse(report.dataset["mode"]))


def emit_report(report: ExperimentReport, out_dir, formats=("json", "csv")) -> list[Path]:
    """Write the report into ``out_dir``.

    ``json``: ``report.json`` (full nested) and ``timings.json``.
    ``csv``: ``cells.csv`` (one row per cell), ``summary.csv`` (mean/std per
    method and parameter setting), ``plot.csv`` (long format, best setting
    per method) and ``timings.csv``.
    """
    if isinstance(formats, str):
        formats = (formats,)
    bad = set(formats) - {"json", "csv"}
    if bad:
        raise ValueError(f"unknown report formats {sorted(bad)}")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out}: {exc.strerror or exc}") from exc
    written = []
    keys = _report_metric_keys(report)
    skip_keys = [f"{k}_skipped" for k in keys if k != "hl"] if report.dataset["mode"] == "multi" else []
    name, sv = report.dataset["name"], report.schema_version
    if "json" in formats:
        written.append(_write_json(out / "report.json", report.to_dict()))
        written.append(_write_json(out / "timings.json", {"schema_version": sv, **report.timings}))
    if "csv" in formats:
        rows = [[sv, report.kind, name, c.method, c.fold, c.params.get("k"), c.params.get("smoothing"),
                 c.status, c.reason] + [c.metrics.get(k) for k in keys] + [c.metrics.get(k) for k in skip_keys]
                for c in report.cells]
        written.append(_write_csv(out / "cells.csv", ["schema_version", "kind", "dataset", "method", "fold", "k",
                                                     "smoothing", "status", "reason", *keys, *skip_keys], rows))
        rows = [[sv, name, g["method"], g["params"].get("k"), g["params"].get("smoothing"), g["folds_ok"],
                 g["folds_failed"]] + [g["mean"][k] for k in keys] + [g["std"][k] for k in keys]
                for g in report.grid_summary]
        written.append(_write_csv(out / "summary.csv", ["schema_version", "dataset", "method", "k", "smoothing",
                                                       "folds_ok", "folds_failed", *[f"{k}_mean" for k in keys],
                                                       *[f"{k}_std" for k in keys]], rows))
        rows = []
        for method, b in report.best.items():
            if b["params"] is None:
                continue
            for k in keys:
                rows.append([sv, name, method, b["params"].get("k"), b["params"].get("smoothing"), k,
                             b["mean"][k], b["std"][k], k in LOWER_IS_BETTER])
        written.append(_write_csv(out / "plot.csv", ["schema_version", "dataset", "method", "k", "smoothing",
                                                    "metric", "mean", "std", "lower_is_better"], rows))
        rows = [[sv, name, t["method"], t["fold"], t["params"].get("k"), t["params"].get("smoothing"),
                 *[t[k] for k in TIMING_KEYS]] for t in report.timings.get("cells", [])]
        written.append(_write_csv(out / "timings.csv", ["schema_version", "dataset", "method", "fold", "k",
                                                       "smoothing", *TIMING_KEYS], rows))
    return written


def report_from_dict(d: dict, timings: dict | None = None) -> ExperimentReport:
    if d.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema version {d.get('schema_version')!r}")
    cells = [Cell(c["method"], c["fold"], c["params"], c["status"], c["reason"], c["metrics"]) for c in d["cells"]]
    timings = dict(timings or {})
    timings.pop("schema_version", None)
    return ExperimentReport(d["kind"], d["dataset"], d["plan"], cells, d["grid_summary"], d["best"], timings,
                            d["schema_version"])


def load_report(path) -> ExperimentReport:
    """Load ``report.json`` (a file or the directory holding it) and, when
    present alongside it, ``timings.json``."""
    path = Path(path)
    if path.is_dir():
        path = path / "report.json"
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    tpath = path.with_name("timings.json")
    timings = json.loads(tpath.read_text()) if tpath.exists() else None
    return report_from_dict(data, timings)


def format_summary(report: ExperimentReport) -> str:
    """Plain-text table of mean (std) per method at its best setting."""
    keys = _report_metric_keys(report)
    lines = [f"{report.dataset['name']} ({report.kind}, selected by {report.selection_metric})",
             "method".ljust(18) + "params".ljust(24) + "".join(k.rjust(20) for k in keys)]
    for method, b in report.best.items():
        if b["params"] is None:
            lines.append(method.ljust(18) + "no successful cells")
            continue
        params = ",".join(f"{k}={v}" for k, v in b["params"].items())
        vals = ["-" if b["mean"][k] is None else f"{b['mean'][k]:.4f} ({b['std'][k]:.4f})" for k in keys]
        lines.append(method.ljust(18) + params.ljust(24) + "".join(v.rjust(20) for v in vals))
    totals = report.timings.get("totals")
    if totals:
        lines.append("timing (s): " + "; ".join(
            f"{m}: gen {t['generation']:.3f} train {t['training']:.3f} pred {t['prediction']:.3f}"
            for m, t in totals.items()))
    return "\n".join(lines)
