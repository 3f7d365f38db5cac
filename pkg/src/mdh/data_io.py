"""Dataset loading, validation, centering, principal components and the
default bandwidth rule."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


class DataError(ValueError):
    """Raised on malformed input data (parse failures, ragged rows, ...)."""


class DegenerateDataError(ValueError):
    """Raised when the data has no variance in any useful direction."""


@dataclass(frozen=True)
class Dataset:
    """An n x d matrix of observations, one row per observation."""

    rows: np.ndarray
    ids: tuple | None = None

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2:
            raise DataError("rows must be a 2-d array")
        if rows.shape[0] < 2 or rows.shape[1] < 2:
            raise DataError(
                f"need at least 2 rows and 2 columns, got shape {rows.shape}")
        if not np.all(np.isfinite(rows)):
            raise DataError("rows contain non-finite values")
        if self.ids is not None and len(self.ids) != rows.shape[0]:
            raise DataError("ids length does not match row count")
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class LabeledSubset:
    """Indices of labelled rows with labels in {-1, +1}."""

    indices: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int)
        lab = np.asarray(self.labels, dtype=int)
        if idx.ndim != 1 or lab.shape != idx.shape:
            raise DataError("indices and labels must be 1-d and equal length")
        if len(np.unique(idx)) != len(idx):
            raise DataError("labelled indices must be distinct")
        if len(idx) < 1:
            raise DataError("at least one labelled row is required")
        if not np.all(np.isin(lab, (-1, 1))):
            raise DataError("labels must be -1 or +1")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "labels", lab)

    @property
    def size(self) -> int:
        return len(self.indices)


def load_csv(path, has_header: bool = False, label_column=None,
             positive_label: str | None = None, ignore_columns=()):
    """Load a dataset from a comma-separated file.

    ``label_column`` selects a column by name (requires a header) or by
    zero-based index; nonempty cells in that column form the labelled subset.
    Label strings are mapped to +1/-1: ``positive_label`` names the +1 symbol,
    otherwise the lexicographically smallest symbol maps to -1.
    ``ignore_columns`` lists further columns (names or indices) excluded from
    the feature matrix, e.g. a ground-truth column kept for evaluation only.

    Returns ``(Dataset, LabeledSubset | None)``.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        raw = [row for row in reader if row]
    if not raw:
        raise DataError(f"{path}: empty file")

    header = None
    if has_header:
        header = raw[0]
        raw = raw[1:]
        if not raw:
            raise DataError(f"{path}: no data rows after header")

    def resolve(column, what):
        if isinstance(column, str) and not str(column).isdigit():
            if header is None:
                raise DataError(f"{what} column by name requires a header")
            try:
                return header.index(column)
            except ValueError:
                raise DataError(
                    f"{what} column {column!r} not found in header")
        return int(column)

    label_idx = None
    if label_column is not None:
        label_idx = resolve(label_column, "label")
    skip = {resolve(col, "ignored") for col in ignore_columns}
    if label_idx is not None:
        skip.discard(label_idx)

    arity = len(raw[0])
    rows = []
    label_strings = []
    for r, cells in enumerate(raw):
        if len(cells) != arity:
            raise DataError(
                f"row {r + 1}: expected {arity} fields, got {len(cells)}")
        feats = []
        for c, cell in enumerate(cells):
            if (label_idx is not None and c == label_idx) or c in skip:
                continue
            try:
                val = float(cell)
            except ValueError:
                raise DataError(
                    f"row {r + 1}, column {c + 1}: cannot parse {cell!r}")
            if not np.isfinite(val):
                raise DataError(
                    f"row {r + 1}, column {c + 1}: non-finite value {cell!r}")
            feats.append(val)
        rows.append(feats)
        if label_idx is not None:
            if label_idx >= len(cells):
                raise DataError(f"row {r + 1}: label column out of range")
            label_strings.append(cells[label_idx].strip())

    ds = Dataset(np.asarray(rows, dtype=float))

    labeled = None
    if label_idx is not None:
        present = [(i, s) for i, s in enumerate(label_strings) if s != ""]
        if present:
            symbols = sorted({s for _, s in present})
            if positive_label is not None:
                if positive_label not in symbols:
                    raise DataError(
                        f"positive label {positive_label!r} not present "
                        f"(found {symbols})")
                mapping = {s: (1 if s == positive_label else -1)
                           for s in symbols}
                if len(symbols) > 2:
                    raise DataError(
                        f"more than two label symbols: {symbols}")
            else:
                if len(symbols) > 2:
                    raise DataError(
                        f"unknown label symbols, expected at most two: "
                        f"{symbols}")
                mapping = {symbols[0]: -1}
                if len(symbols) == 2:
                    mapping[symbols[1]] = 1
            idx = np.array([i for i, _ in present], dtype=int)
            lab = np.array([mapping[s] for _, s in present], dtype=int)
            labeled = LabeledSubset(idx, lab)
    return ds, labeled


def center(ds: Dataset):
    """Subtract column means.  Returns ``(centered, mean)``.

    Hyperplanes found on the centered data map back to the original
    coordinates via ``b_original = b_centered + v . mean``.
    """
    mean = ds.rows.mean(axis=0)
    return Dataset(ds.rows - mean, ds.ids), mean


def standardize(ds: Dataset):
    """Center and scale each column to unit population standard deviation.

    Returns ``(standardized, mean, scale)``.  Zero-variance columns raise
    :class:`DegenerateDataError`.
    """
    mean = ds.rows.mean(axis=0)
    scale = ds.rows.std(axis=0)
    if np.any(scale == 0.0):
        cols = np.nonzero(scale == 0.0)[0]
        raise DegenerateDataError(
            f"zero variance in column(s) {cols.tolist()}")
    return Dataset((ds.rows - mean) / scale, ds.ids), mean, scale


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # deterministic sign: largest-magnitude coordinate positive
    out = vectors.copy()
    for j in range(out.shape[1]):
        i = int(np.argmax(np.abs(out[:, j])))
        if out[i, j] < 0:
            out[:, j] = -out[:, j]
    return out


_POWER_ITER_CAP = 10_000
_POWER_ITER_TOL = 1e-10


def principal_components(ds: Dataset, k: int):
    """Top-k eigenvectors of the population covariance (1/n divisor).

    Returns ``(vectors, variances)`` with ``vectors`` a d x k matrix of unit
    columns, variances nonincreasing.  Uses a full symmetric
    eigendecomposition for d <= 64 and power iteration with deflation above.
    """
    if not 1 <= k <= ds.d:
        raise ValueError(f"k must be in [1, {ds.d}], got {k}")
    x = ds.rows - ds.rows.mean(axis=0)
    cov = (x.T @ x) / ds.n
    if ds.d <= 64:
        vals, vecs = np.linalg.eigh(cov)
        order = np.argsort(vals)[::-1][:k]
        return _fix_signs(vecs[:, order]), vals[order]
    vectors = np.empty((ds.d, k))
    variances = np.empty(k)
    work = cov.copy()
    for j in range(k):
        v = np.ones(ds.d) / np.sqrt(ds.d)
        lam = 0.0
        for it in range(_POWER_ITER_CAP):
            w = work @ v
            norm = np.linalg.norm(w)
            if norm == 0.0:
                break
            w /= norm
            lam = float(w @ work @ w)
            residual = np.linalg.norm(work @ w - lam * w)
            if residual <= _POWER_ITER_TOL * max(1.0, abs(lam)):
                v = w
                break
            v = w
        else:
            raise RuntimeError(
                f"power iteration did not converge for component {j}: "
                f"residual {residual:.3e}")
        vectors[:, j] = v
        variances[j] = lam
        work -= lam * np.outer(v, v)
    return _fix_signs(vectors), variances


def default_bandwidth(ds: Dataset) -> float:
    """Multimodal-density bandwidth rule: 0.9 * std(pc1 projections) * n^(-1/5).

    The standard deviation uses the population (1/n) divisor.
    """
    vecs, variances = principal_components(ds, 1)
    sigma = float(np.sqrt(variances[0]))
    if sigma == 0.0:
        raise DegenerateDataError("zero variance along the first principal "
                                  "component")
    return 0.9 * sigma * ds.n ** (-0.2)
