"""Dataset container, CSV I/O, standardization, fold splitting and label
conversion.

On disk a dataset is a UTF-8 CSV with a header row, feature columns first
and label columns last, plus a sidecar JSON descriptor with the same stem::

    {"label_cols": 1, "mode": "single"}

In single-label mode a single label column holds a categorical class name
which is one-hot encoded on load (classes in sorted order); several label
columns are read as an already one-hot indicator block. In multi-label
mode every label column must be 0 or 1.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np


class DataError(ValueError):
    """Malformed input data (unparseable cell, wrong shape, bad file)."""


class ValidationError(DataError):
    """Data parsed but violates a label or matrix invariant."""


class LabelMode(str, Enum):
    SINGLE = "single"
    MULTI = "multi"

    @classmethod
    def parse(cls, value) -> "LabelMode":
        if isinstance(value, cls):
            return value
        text = str(value).lower().replace("-", "_")
        if text in ("single", "single_label"):
            return cls.SINGLE
        if text in ("multi", "multi_label"):
            return cls.MULTI
        raise ValueError(f"unknown label mode {value!r}")


def _frozen(a, dtype=np.float64):
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def check_features(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ValidationError(f"feature matrix must be 2-D and non-empty, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        r, c = np.argwhere(~np.isfinite(X))[0]
        raise ValidationError(f"non-finite feature value at row {r}, column {c}")
    return X


def check_logical(Y, mode: LabelMode | str) -> np.ndarray:
    mode = LabelMode.parse(mode)
    Y = np.asarray(Y)
    if Y.ndim != 2 or Y.shape[1] < 1:
        raise ValidationError(f"label matrix must be 2-D with at least one column, got shape {Y.shape}")
    bad = (Y != 0) & (Y != 1)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise ValidationError(f"label value {Y[r, c]!r} at row {r}, column {c} is not 0 or 1")
    if mode is LabelMode.SINGLE:
        sums = Y.sum(axis=1)
        if np.any(sums != 1):
            r = int(np.flatnonzero(sums != 1)[0])
            raise ValidationError(f"row {r} is not one-hot (row sum {sums[r]})")
    return Y.astype(np.float64)


def check_fuzzy(U) -> np.ndarray:
    U = np.asarray(U, dtype=np.float64)
    if U.ndim != 2:
        raise ValidationError(f"fuzzy label matrix must be 2-D, got shape {U.shape}")
    if not np.all(np.isfinite(U)) or np.any(U < 0) or np.any(U > 1):
        raise ValidationError("fuzzy label entries must lie in [0, 1]")
    return U


@dataclass(frozen=True)
class Dataset:
    """Features with logical labels and optional true fuzzy labels.

    Arrays are copied on construction and marked read-only.
    """

    features: np.ndarray
    logical: np.ndarray
    mode: LabelMode = LabelMode.SINGLE
    fuzzy: np.ndarray | None = None
    name: str = "dataset"
    label_names: tuple = field(default=())

    def __post_init__(self):
        mode = LabelMode.parse(self.mode)
        X = check_features(self.features)
        Y = check_logical(self.logical, mode)
        if Y.shape[0] != X.shape[0]:
            raise ValidationError(f"{X.shape[0]} feature rows but {Y.shape[0]} label rows")
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "logical", _frozen(Y))
        if self.fuzzy is not None:
            U = check_fuzzy(self.fuzzy)
            if U.shape != Y.shape:
                raise ValidationError(f"fuzzy labels shape {U.shape} != logical shape {Y.shape}")
            object.__setattr__(self, "fuzzy", _frozen(U))
        names = tuple(str(n) for n in self.label_names) or tuple(f"y{j}" for j in range(Y.shape[1]))
        if len(names) != Y.shape[1]:
            raise ValidationError(f"{len(names)} label names for {Y.shape[1]} label columns")
        object.__setattr__(self, "label_names", names)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_labels(self) -> int:
        return self.logical.shape[1]

    def class_indices(self) -> np.ndarray:
        """Per-row class index (single-label mode only)."""
        if self.mode is not LabelMode.SINGLE:
            raise ValueError("class indices are only defined in single-label mode")
        return np.argmax(self.logical, axis=1)

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        return Dataset(
            features=self.features[idx],
            logical=self.logical[idx],
            mode=self.mode,
            fuzzy=None if self.fuzzy is None else self.fuzzy[idx],
            name=self.name,
            label_names=self.label_names,
        )

    def with_fuzzy(self, fuzzy) -> "Dataset":
        return Dataset(self.features, self.logical, self.mode, fuzzy, self.name, self.label_names)


# ---------------------------------------------------------------- CSV I/O

def descriptor_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def _parse_float(text: str, row: int, col: int, header) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"row {row}, column {col} ({header[col]!r}): cannot parse {text!r} as a number") from None
    if not math.isfinite(value):
        raise DataError(f"row {row}, column {col} ({header[col]!r}): non-finite value {text!r}")
    return value


def load_csv(path, label_cols: int | None = None, mode=None, name: str | None = None,
             fuzzy_path=None) -> Dataset:
    """Load a dataset CSV.

    ``label_cols`` and ``mode`` default to the sidecar descriptor. Row numbers
    in error messages count data rows from 1 (the header is row 0).
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    desc = {}
    dpath = descriptor_path(path)
    if dpath.exists():
        try:
            desc = json.loads(dpath.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DataError(f"{dpath}: invalid JSON descriptor ({exc})") from None
    if label_cols is None:
        label_cols = desc.get("label_cols")
    if mode is None:
        mode = desc.get("mode")
    if label_cols is None or mode is None:
        raise DataError(f"{path}: label_cols and mode must be given or present in {dpath.name}")
    mode = LabelMode.parse(mode)
    label_cols = int(label_cols)

    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty file")
    header, body = rows[0], [r for r in rows[1:] if r]
    ncol = len(header)
    if not 1 <= label_cols < ncol:
        raise DataError(f"{path}: label_cols={label_cols} incompatible with {ncol} columns")
    if not body:
        raise DataError(f"{path}: no data rows")
    n_feat = ncol - label_cols
    X = np.empty((len(body), n_feat))
    raw_labels = []
    for i, row in enumerate(body, start=1):
        if len(row) != ncol:
            raise DataError(f"{path}: row {i} has {len(row)} fields, expected {ncol}")
        for j in range(n_feat):
            X[i - 1, j] = _parse_float(row[j].strip(), i, j, header)
        raw_labels.append([c.strip() for c in row[n_feat:]])

    label_header = header[n_feat:]
    if mode is LabelMode.SINGLE and label_cols == 1:
        values = [r[0] for r in raw_labels]
        classes = desc.get("classes") or sorted(set(values), key=_class_sort_key)
        lookup = {c: k for k, c in enumerate(classes)}
        Y = np.zeros((len(values), len(classes)))
        for i, v in enumerate(values):
            if v not in lookup:
                raise ValidationError(f"{path}: row {i + 1}: unknown class {v!r}")
            Y[i, lookup[v]] = 1.0
        label_names = tuple(classes)
    else:
        Y = np.empty((len(raw_labels), label_cols))
        for i, r in enumerate(raw_labels, start=1):
            for j, text in enumerate(r):
                Y[i - 1, j] = _parse_float(text, i, n_feat + j, header)
        label_names = tuple(label_header)

    fuzzy = None
    if fuzzy_path is not None:
        fuzzy = load_fuzzy_csv(fuzzy_path)
    return Dataset(X, Y, mode, fuzzy, name or path.stem, label_names)


def _class_sort_key(v: str):
    try:
        return (0, float(v), v)
    except ValueError:
        return (1, 0.0, v)


def save_csv(dataset: Dataset, path, feature_names=None) -> Path:
    """Write ``dataset`` as CSV plus sidecar descriptor; returns the CSV path.

    Values are written with ``repr`` so they round-trip exactly.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    feature_names = list(feature_names or (f"x{j}" for j in range(dataset.n_features)))
    single = dataset.mode is LabelMode.SINGLE
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(feature_names + (["class"] if single else list(dataset.label_names)))
        cls = dataset.class_indices() if single else None
        for i in range(dataset.n_samples):
            feats = [repr(float(v)) for v in dataset.features[i]]
            if single:
                w.writerow(feats + [dataset.label_names[cls[i]]])
            else:
                w.writerow(feats + [str(int(v)) for v in dataset.logical[i]])
    desc = {"label_cols": 1 if single else dataset.n_labels, "mode": dataset.mode.value}
    if single:
        desc["classes"] = list(dataset.label_names)
    descriptor_path(path).write_text(json.dumps(desc, indent=2) + "\n", encoding="utf-8")
    return path


def save_fuzzy_csv(fuzzy, path, label_names=None) -> Path:
    """Write an N x L fuzzy label matrix, 6 significant digits per value."""
    fuzzy = np.asarray(fuzzy, dtype=np.float64)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(label_names or (f"y{j}" for j in range(fuzzy.shape[1])))
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"u_{n}" for n in names])
        for row in fuzzy:
            w.writerow([f"{v:.6g}" for v in row])
    return path


def load_fuzzy_csv(path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2:
        raise DataError(f"{path}: no data rows")
    header = rows[0]
    U = np.empty((len(rows) - 1, len(header)))
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != len(header):
            raise DataError(f"{path}: row {i} has {len(row)} fields, expected {len(header)}")
        for j, text in enumerate(row):
            U[i - 1, j] = _parse_float(text.strip(), i, j, header)
    return check_fuzzy(U)


def load_arff(path, label_count: int, mode="multi", name: str | None = None) -> Dataset:
    """Load a dense MULAN-style ARFF file whose last ``label_count``
    attributes are the 0/1 labels.

    Nominal feature values that read as numbers are kept as numbers; other
    nominal values are coded by their position in the attribute declaration.
    """
    from scipy.io import arff

    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    try:
        data, meta = arff.loadarff(str(path))
    except (ValueError, NotImplementedError, arff.ParseArffError) as exc:
        raise DataError(f"{path}: cannot parse ARFF ({exc})") from None
    names = meta.names()
    if not 1 <= label_count < len(names):
        raise DataError(f"{path}: label_count={label_count} incompatible with {len(names)} attributes")
    cols = []
    for j, attr in enumerate(names):
        kind, values = meta[attr]
        raw = data[attr]
        if kind == "numeric":
            col = np.asarray(raw, dtype=np.float64)
        elif kind == "nominal":
            text = [v.decode() if isinstance(v, bytes) else str(v) for v in raw]
            if "?" in text:
                raise DataError(f"{path}: attribute {attr!r} has missing values")
            try:
                col = np.array([float(t) for t in text])
            except ValueError:
                order = {v: k for k, v in enumerate(values)}
                col = np.array([float(order[t]) for t in text])
        else:
            raise DataError(f"{path}: attribute {attr!r} has unsupported type {kind}")
        if not np.all(np.isfinite(col)):
            raise DataError(f"{path}: attribute {attr!r} has missing or non-finite values")
        cols.append(col)
    M = np.column_stack(cols)
    n_feat = len(names) - label_count
    return Dataset(M[:, :n_feat], M[:, n_feat:], mode, None, name or path.stem, tuple(names[n_feat:]))


# ---------------------------------------------------------- preprocessing

@dataclass(frozen=True)
class Standardizer:
    """Per-column affine map fitted by :func:`standardize`."""

    mean: np.ndarray
    std: np.ndarray

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        scale = np.where(self.std > 0, self.std, 1.0)
        Z = (X - self.mean) / scale
        Z[:, self.std == 0] = 0.0
        return Z


def standardize(X) -> tuple[np.ndarray, Standardizer]:
    """Zero-mean, unit population-std columns; constant columns become 0."""
    X = check_features(X)
    if X.shape[0] < 2:
        raise ValueError("standardization needs at least 2 rows")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std[np.ptp(X, axis=0) == 0] = 0.0
    params = Standardizer(_frozen(mean), _frozen(std))
    return params.transform(X), params


@dataclass(frozen=True)
class FoldSplit:
    fold_count: int
    assignments: np.ndarray
    seed: int

    def train_test(self, fold: int) -> tuple[np.ndarray, np.ndarray]:
        if not 0 <= fold < self.fold_count:
            raise IndexError(f"fold {fold} out of range [0, {self.fold_count})")
        test = self.assignments == fold
        return np.flatnonzero(~test), np.flatnonzero(test)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.fold_count)

    def __iter__(self):
        for f in range(self.fold_count):
            yield self.train_test(f)


def kfold_split(n: int, fold_count: int = 5, seed: int = 0, classes=None) -> FoldSplit:
    """Seeded k-fold assignment.

    With ``classes`` (per-instance class index) the folds are stratified:
    instances are shuffled within each class, laid out class by class and
    dealt round-robin, so fold sizes still differ by at most one.
    """
    if fold_count < 2:
        raise ValueError("fold_count must be at least 2")
    if n < fold_count:
        raise ValueError(f"cannot split {n} instances into {fold_count} folds")
    rng = np.random.default_rng(seed)
    if classes is None:
        order = rng.permutation(n)
    else:
        classes = np.asarray(classes)
        if classes.shape != (n,):
            raise ValueError("classes must have one entry per instance")
        order = np.concatenate([rng.permutation(np.flatnonzero(classes == c))
                                for c in np.unique(classes)])
    assign = np.empty(n, dtype=np.intp)
    assign[order] = np.arange(n) % fold_count
    return FoldSplit(fold_count, _frozen(assign, np.intp), int(seed))


def fuzzy_to_logical(fuzzy, mode, threshold: float = 0.5) -> np.ndarray:
    """Convert fuzzy labels to logical labels.

    Single-label: one-hot at the row maximum (first column on ties).
    Multi-label: 1 where the value is >= ``threshold``.
    """
    U = np.asarray(fuzzy, dtype=np.float64)
    if U.ndim == 1:
        return fuzzy_to_logical(U[None, :], mode, threshold)[0]
    mode = LabelMode.parse(mode)
    if mode is LabelMode.SINGLE:
        out = np.zeros_like(U)
        out[np.arange(U.shape[0]), np.argmax(U, axis=1)] = 1.0
        return out
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    return (U >= threshold).astype(np.float64)
