"""Dataset ingestion, normalization, synthetic blobs, and link sampling.

Feature matrices are plain ``(n, d)`` float arrays.  Labels, when present,
take values in ``{1, ..., c}``.  Pairwise side information is held in a
:class:`ConstraintSet`; sample indices are 0-based in memory and 1-based in
the on-disk constraint format.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

NORMALIZE_SCHEMES = ("minmax-symmetric", "zscore", "none")
DATASET_FORMATS = ("csv", "labeled-csv")


class DatasetFormatError(ValueError):
    """A data file could not be parsed; the message names the offending line."""


class EmptyDatasetError(DatasetFormatError):
    """The file contains no data rows."""


class ConstraintFormatError(ValueError):
    """A constraint file or link list is malformed."""


@dataclass(frozen=True)
class Dataset:
    """Feature vectors plus optional ground-truth labels.

    Parameters
    ----------
    features : ndarray of shape (n, d)
        One row per sample; all entries must be finite.
    labels : ndarray of shape (n,), optional
        Integer class labels in ``{1, ..., c}``.
    c : int, optional
        Number of classes. Required whenever labels are present.
    name : str
        Free-form identifier used in reports.
    """

    features: np.ndarray
    labels: np.ndarray | None = None
    c: int | None = None
    name: str = ""

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=float)
        if feats.ndim != 2 or feats.shape[0] < 1 or feats.shape[1] < 1:
            raise ValueError(f"features must be a non-empty 2-d matrix, got shape {feats.shape}")
        if not np.all(np.isfinite(feats)):
            raise ValueError("features contain non-finite entries")
        object.__setattr__(self, "features", feats)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=int)
            if labels.shape != (feats.shape[0],):
                raise ValueError(f"labels must have shape ({feats.shape[0]},), got {labels.shape}")
            if self.c is None:
                raise ValueError("c must be given when labels are present")
            if labels.min() < 1 or labels.max() > self.c:
                raise ValueError(f"labels must lie in 1..{self.c}")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class ConstraintSet:
    """Must-link and cannot-link sample pairs over ``n`` samples.

    Pairs are unordered, stored as ``(i, j)`` with ``i < j``, 0-based.  A pair
    may not appear in both lists and self-pairs are rejected.
    """

    must_links: tuple[tuple[int, int], ...]
    cannot_links: tuple[tuple[int, int], ...]
    n: int

    def __post_init__(self):
        must = tuple(self._check_pair(p) for p in self.must_links)
        cannot = tuple(self._check_pair(p) for p in self.cannot_links)
        overlap = set(must) & set(cannot)
        if overlap:
            raise ConstraintFormatError(f"pairs present in both link lists: {sorted(overlap)}")
        object.__setattr__(self, "must_links", must)
        object.__setattr__(self, "cannot_links", cannot)

    def _check_pair(self, pair) -> tuple[int, int]:
        i, j = int(pair[0]), int(pair[1])
        if i == j:
            raise ConstraintFormatError(f"self-pair ({i}, {i}) is not a valid link")
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise ConstraintFormatError(f"pair ({i}, {j}) out of range for n={self.n}")
        return (i, j) if i < j else (j, i)

    def __len__(self) -> int:
        return len(self.must_links) + len(self.cannot_links)

    def must_link_matrix(self) -> np.ndarray:
        """Symmetric binary matrix with unit diagonal marking must-links."""
        m = np.eye(self.n)
        for i, j in self.must_links:
            m[i, j] = m[j, i] = 1.0
        return m

    def cannot_link_matrix(self) -> np.ndarray:
        """Symmetric binary matrix with zero diagonal marking cannot-links."""
        m = np.zeros((self.n, self.n))
        for i, j in self.cannot_links:
            m[i, j] = m[j, i] = 1.0
        return m


def empty_constraints(n: int) -> ConstraintSet:
    return ConstraintSet((), (), n)


def _parse_rows(path, fmt, allow_empty):
    if fmt not in DATASET_FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {DATASET_FORMATS}")
    path = Path(path)
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        first_data_line = None
        for lineno, cells in enumerate(reader, start=1):
            if not cells or all(cell.strip() == "" for cell in cells):
                continue
            if first_data_line is None:
                # Header auto-detection: a first line with any non-numeric
                # cell is treated as a header and skipped.
                try:
                    [float(cell) for cell in cells]
                except ValueError:
                    continue
                first_data_line = lineno
            values = []
            for cell in cells:
                try:
                    values.append(float(cell))
                except ValueError:
                    raise DatasetFormatError(
                        f"{path}: non-numeric cell {cell.strip()!r} on line {lineno}"
                    ) from None
            rows.append((lineno, values))
    if not rows:
        if allow_empty:
            return []
        raise EmptyDatasetError(f"{path}: file contains no data rows")
    width = len(rows[0][1])
    for lineno, values in rows:
        if len(values) != width:
            raise DatasetFormatError(
                f"{path}: ragged row on line {lineno} ({len(values)} cells, expected {width})"
            )
        if not all(np.isfinite(v) for v in values):
            raise DatasetFormatError(f"{path}: non-finite value on line {lineno}")
    return rows


def load_dataset(path, fmt: str = "csv", allow_empty: bool = False) -> Dataset | None:
    """Load a dataset from a CSV file.

    ``fmt="csv"`` reads every column as a feature.  ``fmt="labeled-csv"``
    treats the last column as integer class labels and infers the class count
    as the largest label.  An optional header line is detected automatically
    (first line containing any non-numeric cell).

    Returns ``None`` for a file without data rows when ``allow_empty`` is set;
    otherwise raises :class:`DatasetFormatError` with the offending line number.
    """
    rows = _parse_rows(path, fmt, allow_empty)
    if not rows:
        return None
    matrix = np.array([values for _, values in rows], dtype=float)
    name = Path(path).stem
    if fmt == "csv":
        return Dataset(features=matrix, name=name)
    if matrix.shape[1] < 2:
        raise DatasetFormatError(f"{path}: labeled-csv needs at least one feature column")
    raw_labels = matrix[:, -1]
    for (lineno, _), value in zip(rows, raw_labels):
        if value != int(value):
            raise DatasetFormatError(f"{path}: non-integer label {value!r} on line {lineno}")
        if value < 1:
            raise DatasetFormatError(f"{path}: label {int(value)} < 1 on line {lineno}")
    labels = raw_labels.astype(int)
    return Dataset(features=matrix[:, :-1], labels=labels, c=int(labels.max()), name=name)


def normalize(ds: Dataset, scheme: str = "minmax-symmetric") -> Dataset:
    """Rescale feature columns.

    ``minmax-symmetric`` maps each column affinely onto [-1, 1], ``zscore``
    standardizes to mean 0 / unit variance, ``none`` returns the input
    unchanged.  Constant columns map to 0 under both schemes.
    """
    if scheme not in NORMALIZE_SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {NORMALIZE_SCHEMES}")
    if scheme == "none":
        return ds
    x = ds.features.copy()
    if scheme == "minmax-symmetric":
        lo = x.min(axis=0)
        hi = x.max(axis=0)
        span = hi - lo
        constant = span == 0
        span[constant] = 1.0
        x = 2.0 * (x - lo) / span - 1.0
        x[:, constant] = 0.0
    else:
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        constant = std == 0
        std[constant] = 1.0
        x = (x - mean) / std
        x[:, constant] = 0.0
    return replace(ds, features=x)


def _simplex_centers(c: int, d: int, separation: float) -> np.ndarray:
    """Cluster centers with pairwise distance ``separation`` (a regular simplex).

    When ``d < c - 1`` the simplex cannot be embedded exactly and the centers
    are its projection onto the top ``d`` principal axes.
    """
    centers = np.eye(c) * (separation / np.sqrt(2.0))
    centers -= centers.mean(axis=0)
    # Rotate into the (c-1)-dimensional span, then pad or truncate to d axes.
    u, s, _ = np.linalg.svd(centers, full_matrices=False)
    coords = u * s
    out = np.zeros((c, d))
    k = min(d, c)
    out[:, :k] = coords[:, :k]
    return out


def make_blobs(n_per_class: int, c: int, d: int, separation: float, seed: int) -> Dataset:
    """Generate ``c`` isotropic unit-variance Gaussian clusters.

    Centers sit on a regular simplex with edge length ``separation``.  Labels
    ``1..c`` are attached in contiguous blocks of ``n_per_class`` samples.
    Output is deterministic for a given seed.
    """
    if n_per_class < 1 or c < 1 or d < 1:
        raise ValueError("n_per_class, c and d must all be >= 1")
    rng = np.random.default_rng(seed)
    centers = _simplex_centers(c, d, float(separation))
    features = rng.standard_normal((n_per_class * c, d)) + np.repeat(centers, n_per_class, axis=0)
    labels = np.repeat(np.arange(1, c + 1), n_per_class)
    return Dataset(features=features, labels=labels, c=c, name=f"blobs{c}x{n_per_class}")


def _unrank_pairs(n: int, ranks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Pairs (i, j), i < j, in lexicographic order; ranks index into that order.
    ends = np.cumsum(np.arange(n - 1, 0, -1))
    i = np.searchsorted(ends, ranks, side="right")
    starts = np.concatenate(([0], ends[:-1]))
    j = i + 1 + (ranks - starts[i])
    return i, j


def sample_constraints(labels, n_links: int, seed: int) -> ConstraintSet:
    """Sample ``n_links`` distinct unordered pairs and label them as links.

    Pairs are drawn uniformly without replacement from all n(n-1)/2 pairs.
    A pair whose samples share a label becomes a must-link, otherwise a
    cannot-link.  Deterministic for a given seed.
    """
    labels = np.asarray(labels, dtype=int)
    n = labels.shape[0]
    total = n * (n - 1) // 2
    if n_links < 0 or n_links > total:
        raise ValueError(f"n_links must be in 0..{total}, got {n_links}")
    if n_links == 0:
        return empty_constraints(n)
    rng = np.random.default_rng(seed)
    ranks = np.sort(rng.choice(total, size=n_links, replace=False))
    ii, jj = _unrank_pairs(n, ranks)
    same = labels[ii] == labels[jj]
    must = tuple((int(a), int(b)) for a, b in zip(ii[same], jj[same]))
    cannot = tuple((int(a), int(b)) for a, b in zip(ii[~same], jj[~same]))
    return ConstraintSet(must, cannot, n)


def save_constraints(cs: ConstraintSet, path) -> None:
    """Write links as ``i j +1`` (must) / ``i j -1`` (cannot), 1-based indices."""
    lines = ["# i j kind   (1-based indices; +1 must-link, -1 cannot-link)"]
    for i, j in cs.must_links:
        lines.append(f"{i + 1} {j + 1} +1")
    for i, j in cs.cannot_links:
        lines.append(f"{i + 1} {j + 1} -1")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_constraints(path, n: int) -> ConstraintSet:
    """Read a constraint file (see :func:`save_constraints` for the format).

    ``#`` starts a comment; indices are 1-based in the file and validated
    against the sample count ``n``.
    """
    must, cannot = [], []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ConstraintFormatError(
                f"{path}: line {lineno}: expected 'i j kind', got {raw.strip()!r}"
            )
        try:
            i, j, kind = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError:
            raise ConstraintFormatError(f"{path}: line {lineno}: non-integer field") from None
        if kind not in (1, -1):
            raise ConstraintFormatError(f"{path}: line {lineno}: kind must be +1 or -1, got {kind}")
        if not (1 <= i <= n and 1 <= j <= n):
            raise ConstraintFormatError(
                f"{path}: line {lineno}: index out of range 1..{n}: ({i}, {j})"
            )
        if i == j:
            raise ConstraintFormatError(f"{path}: line {lineno}: self-pair ({i}, {j})")
        (must if kind == 1 else cannot).append((i - 1, j - 1))
    return ConstraintSet(tuple(must), tuple(cannot), n)
