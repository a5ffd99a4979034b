"""Tabular data loading, encoding, standardization, splitting, and binning.

Everything here is deterministic and seed-free: one-hot columns are ordered
lexicographically, the train/test split is an arithmetic rule on within-class
row indices, and binning is rank-based. Identical inputs therefore produce
identical downstream artifacts in any implementation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, UsageError

DEFAULT_BINS = 8


@dataclass(frozen=True)
class Dataset:
    """Numeric feature matrix with a binary target.

    ``features`` is (N, n) float64 with no missing entries; ``target`` holds
    labels in {0, 1} with both classes present. ``column_means``/
    ``column_stds`` are set only after standardization (stds are sample
    standard deviations; 0.0 marks a constant column).
    """

    features: np.ndarray
    target: np.ndarray
    feature_names: tuple[str, ...]
    standardized: bool = False
    column_means: np.ndarray | None = None
    column_stds: np.ndarray | None = None
    n_dropped_rows: int = 0

    def __post_init__(self):
        self.features.setflags(write=False)
        self.target.setflags(write=False)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class DiscretizedDataset:
    """Integer bin codes per feature, for histogram-based MI estimation."""

    codes: np.ndarray
    bin_counts: np.ndarray
    target: np.ndarray
    source_names: tuple[str, ...]

    @property
    def n_samples(self) -> int:
        return self.codes.shape[0]

    @property
    def n_features(self) -> int:
        return self.codes.shape[1]


def _is_float(text: str) -> bool:
    # Non-finite tokens ("nan", "inf") count as categorical values, never as
    # numbers: the loaded matrix must be free of non-finite entries.
    try:
        return math.isfinite(float(text))
    except ValueError:
        return False


def load_csv(path, target_column: str) -> Dataset:
    """Load a UTF-8 CSV with a header row into a :class:`Dataset`.

    Rows with any empty cell are dropped (and counted). Feature columns whose
    remaining values all parse as floats pass through; other columns are
    one-hot expanded into ``"<col>=<value>"`` indicators with values sorted
    lexicographically. The target column must take exactly two distinct raw
    values; the lexicographically smaller one maps to 0.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"cannot read CSV file {path!r}: {exc}") from exc
    if not rows:
        raise DataError(f"{path!r} is empty (no header row)")

    header = rows[0]
    body = [r for r in rows[1:] if r]
    hits = [idx for idx, name in enumerate(header) if name == target_column]
    if not hits:
        raise DataError(f"target column {target_column!r} not found in header")
    if len(hits) > 1 or len(set(header)) != len(header):
        raise DataError(f"ambiguous header: duplicated column names in {path!r}")
    t_idx = hits[0]

    n_cols = len(header)
    kept, dropped = [], 0
    for row in body:
        if len(row) != n_cols or any(cell == "" for cell in row):
            dropped += 1
            continue
        kept.append(row)
    if not kept:
        raise DataError("zero usable rows after dropping rows with missing cells")

    raw_target = [row[t_idx] for row in kept]
    classes = sorted(set(raw_target))
    if len(classes) != 2:
        raise DataError(
            f"target column {target_column!r} has {len(classes)} distinct values, need exactly 2"
        )
    target = np.array([classes.index(v) for v in raw_target], dtype=np.int64)

    columns: list[np.ndarray] = []
    names: list[str] = []
    for j, col_name in enumerate(header):
        if j == t_idx:
            continue
        values = [row[j] for row in kept]
        if all(_is_float(v) for v in values):
            columns.append(np.array([float(v) for v in values], dtype=np.float64))
            names.append(col_name)
        else:
            for level in sorted(set(values)):
                columns.append(np.array([1.0 if v == level else 0.0 for v in values]))
                names.append(f"{col_name}={level}")
    if len(set(names)) != len(names):
        raise DataError("one-hot expansion produced duplicate feature names")

    features = np.column_stack(columns) if columns else np.empty((len(kept), 0))
    return Dataset(
        features=features,
        target=target,
        feature_names=tuple(names),
        n_dropped_rows=dropped,
    )


def standardize(d: Dataset) -> Dataset:
    """Z-score every column (mean over N, std with N-1 in the denominator).

    Constant columns become all-zeros instead of being removed, keeping
    feature indices stable; their recorded std is 0.0.
    """
    if d.standardized:
        raise UsageError("dataset is already standardized")
    if d.n_samples < 2:
        raise DataError("standardization needs at least 2 samples")
    means = d.features.mean(axis=0)
    stds = d.features.std(axis=0, ddof=1)
    centered = d.features - means
    out = np.where(stds == 0.0, 0.0, centered / np.where(stds == 0.0, 1.0, stds))
    return Dataset(
        features=out,
        target=d.target,
        feature_names=d.feature_names,
        standardized=True,
        column_means=means,
        column_stds=stds,
        n_dropped_rows=d.n_dropped_rows,
    )


def stratified_split(d: Dataset, test_fraction: float) -> tuple[Dataset, Dataset]:
    """Deterministic, seed-free stratified split.

    Within each class, the r-th row (0-indexed, original order) goes to the
    test split iff ``floor((r+1)*f) > floor(r*f)``; everything else trains.
    Both splits preserve the original relative row order.
    """
    if not 0.0 < test_fraction < 1.0:
        raise UsageError(f"test_fraction must be in (0,1), got {test_fraction}")
    labels = np.unique(d.target)
    to_test = np.zeros(d.n_samples, dtype=bool)
    for label in labels:
        rows = np.flatnonzero(d.target == label)
        if rows.size < 2:
            raise DataError(f"class {label} has fewer than 2 samples")
        for r, row in enumerate(rows):
            if int((r + 1) * test_fraction) > int(r * test_fraction):
                to_test[row] = True
        n_test = int(to_test[rows].sum())
        if n_test == 0 or n_test == rows.size:
            raise DataError(
                f"class {label} would get an empty train or test split at "
                f"test_fraction={test_fraction}"
            )

    def _take(mask: np.ndarray) -> Dataset:
        return Dataset(
            features=d.features[mask].copy(),
            target=d.target[mask].copy(),
            feature_names=d.feature_names,
            standardized=d.standardized,
            column_means=d.column_means,
            column_stds=d.column_stds,
            n_dropped_rows=d.n_dropped_rows,
        )

    return _take(~to_test), _take(to_test)


def _bin_column(values: np.ndarray, max_bins: int) -> tuple[np.ndarray, int]:
    """Equal-frequency, rank-based binning of one column.

    Sorted position m maps to provisional bin floor(m*B/N) (edges at the
    empirical B-quantiles); a tie group takes the bin of its midpoint
    position, so equal values always share a bin, and bin labels are
    re-compressed to consecutive integers. Assignment depends only on value
    ranks, so any strictly monotone transform of the column yields identical
    codes.
    """
    n = values.shape[0]
    n_distinct = np.unique(values).shape[0]
    b = min(max_bins, n_distinct)
    if b <= 1:
        return np.zeros(n, dtype=np.int64), 1
    order = np.argsort(values, kind="stable")
    positions = np.arange(n, dtype=np.int64)
    sorted_vals = values[order]
    is_start = np.ones(n, dtype=bool)
    is_start[1:] = sorted_vals[1:] != sorted_vals[:-1]
    group_start = np.maximum.accumulate(np.where(is_start, positions, 0))
    is_end = np.ones(n, dtype=bool)
    is_end[:-1] = is_start[1:]
    group_end = np.minimum.accumulate(np.where(is_end, positions, n - 1)[::-1])[::-1]
    representative = (group_start + group_end) // 2
    tied_bin = np.empty(n, dtype=np.int64)
    tied_bin[order] = (representative * b) // n
    used = np.unique(tied_bin)
    codes = np.searchsorted(used, tied_bin)
    return codes.astype(np.int64), used.shape[0]


def discretize(d: Dataset, max_bins: int = DEFAULT_BINS) -> DiscretizedDataset:
    """Per-feature equal-frequency binning with B = min(max_bins, #distinct)."""
    if max_bins < 2:
        raise UsageError(f"max_bins must be >= 2, got {max_bins}")
    codes = np.empty((d.n_samples, d.n_features), dtype=np.int64)
    bin_counts = np.empty(d.n_features, dtype=np.int64)
    for j in range(d.n_features):
        codes[:, j], bin_counts[j] = _bin_column(d.features[:, j], max_bins)
    return DiscretizedDataset(
        codes=codes,
        bin_counts=bin_counts,
        target=d.target.copy(),
        source_names=d.feature_names,
    )


def subset_features(d: Dataset, indices) -> Dataset:
    """Dataset restricted to the given feature columns (order preserved)."""
    idx = list(indices)
    if any(i < 0 or i >= d.n_features for i in idx):
        raise UsageError(f"feature index out of range in {idx}")
    return Dataset(
        features=d.features[:, idx].copy(),
        target=d.target.copy(),
        feature_names=tuple(d.feature_names[i] for i in idx),
        standardized=d.standardized,
        column_means=None if d.column_means is None else d.column_means[idx],
        column_stds=None if d.column_stds is None else d.column_stds[idx],
        n_dropped_rows=d.n_dropped_rows,
    )
