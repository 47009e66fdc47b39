"""Datasets, synthetic mixtures and resampling primitives.

Items are identified by their 0-based row index after missing-value rows
have been dropped; every downstream set of item ids refers to these rows.
"""
from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

MISSING_TOKENS = frozenset({"", "NA"})

# spawn_key prefixes that keep the random streams of different pipeline
# stages disjoint for a single master seed
STREAM_REFERENCE = 0
STREAM_BOOTSTRAP = 1
STREAM_DIRECT = 2


class DataError(ValueError):
    """Raised when a dataset cannot be read or violates its invariants."""


@dataclass(frozen=True, eq=False)
class Dataset:
    """An immutable n x d feature matrix with optional ground-truth labels."""

    features: np.ndarray
    labels: np.ndarray | None = None
    feature_names: tuple[str, ...] = ()
    label_name: str | None = None

    def __post_init__(self):
        X = np.array(self.features, dtype=float, copy=True)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise DataError(f"features must be a non-empty n x d matrix, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain non-finite values")
        X.setflags(write=False)
        object.__setattr__(self, "features", X)
        if self.labels is not None:
            y = np.asarray(self.labels).copy()
            if y.shape != (X.shape[0],):
                raise DataError(f"labels length {y.shape} does not match n={X.shape[0]}")
            y.setflags(write=False)
            object.__setattr__(self, "labels", y)
        names = tuple(self.feature_names) or tuple(f"x{j}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise DataError("feature_names length does not match d")
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def ids(self) -> np.ndarray:
        return np.arange(self.n)

    def take(self, indices) -> "Dataset":
        """Rows at ``indices`` (duplicates allowed), labels carried along."""
        indices = np.asarray(indices, dtype=np.intp)
        labels = None if self.labels is None else self.labels[indices]
        return Dataset(self.features[indices], labels, self.feature_names, self.label_name)

    def fingerprint(self) -> str:
        """Short content hash, used to detect result files from different data."""
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.features).tobytes())
        h.update(repr(self.features.shape).encode())
        if self.labels is not None:
            h.update("\x1f".join(map(str, self.labels)).encode())
        return h.hexdigest()[:16]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        same_labels = (self.labels is None and other.labels is None) or (
            self.labels is not None
            and other.labels is not None
            and np.array_equal(self.labels.astype(str), other.labels.astype(str))
        )
        return (
            self.features.shape == other.features.shape
            and np.array_equal(self.features, other.features)
            and same_labels
            and self.feature_names == other.feature_names
        )

    __hash__ = None


def _parse_label(values: list[str]) -> np.ndarray:
    try:
        as_int = [int(v) for v in values]
    except ValueError:
        return np.array(values, dtype=str)
    return np.array(as_int, dtype=np.int64)


def load_csv(path, label_column: str | None = None) -> Dataset:
    """Read a comma-separated file with a header row.

    Rows with any missing field (empty or ``NA``) are dropped as a whole.
    Every column except ``label_column`` must be numeric.

    Raises
    ------
    DataError
        If the file cannot be read, the label column is absent, a value is not
        numeric, or no rows survive the missing-value filter.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            rows = [r for r in reader if r]
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not header:
        raise DataError(f"{path}: missing header row")
    header = [h.strip() for h in header]

    label_idx = None
    if label_column is not None:
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not in header")
        label_idx = header.index(label_column)
    feat_idx = [j for j in range(len(header)) if j != label_idx]
    if not feat_idx:
        raise DataError(f"{path}: no feature columns")

    features, labels = [], []
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        cells = [c.strip() for c in row]
        if any(c in MISSING_TOKENS for c in cells):
            continue
        try:
            features.append([float(cells[j]) for j in feat_idx])
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: non-numeric feature value ({exc})") from None
        if label_idx is not None:
            labels.append(cells[label_idx])
    if not features:
        raise DataError(f"{path}: zero rows after dropping rows with missing values")

    return Dataset(
        np.array(features, dtype=float),
        _parse_label(labels) if label_idx is not None else None,
        tuple(header[j] for j in feat_idx),
        label_column,
    )


def save_csv(data: Dataset, path) -> None:
    """Write ``data`` in the format read by :func:`load_csv`.

    Floats are written with ``repr`` so a reload reproduces them bit-exactly.
    """
    path = Path(path)
    label_name = data.label_name or "label"
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = list(data.feature_names)
        if data.labels is not None:
            header.append(label_name)
        w.writerow(header)
        for i in range(data.n):
            row = [repr(float(v)) for v in data.features[i]]
            if data.labels is not None:
                row.append(str(data.labels[i]))
            w.writerow(row)


def _bundled(name: str, label_column: str) -> Dataset:
    with resources.as_file(resources.files("coreclust") / "data" / name) as p:
        return load_csv(p, label_column)


def load_iris() -> Dataset:
    """Fisher's iris data: 150 items, 4 features, 3 species."""
    return _bundled("iris.csv", "species")


def load_bcw() -> Dataset:
    """Breast Cancer Wisconsin (original): 683 complete items, 9 features, 2 classes."""
    return _bundled("bcw.csv", "class")


@dataclass(frozen=True)
class GaussianMixtureSpec:
    """Isotropic Gaussian mixture: one mean, one scalar variance and one weight per component.

    Weights are normalised on construction.
    """

    means: np.ndarray
    variances: np.ndarray = None
    weights: np.ndarray = None

    def __post_init__(self):
        means = np.atleast_2d(np.asarray(self.means, dtype=float))
        K = means.shape[0]
        if K < 1:
            raise ValueError("mixture needs at least one component")
        var = np.ones(K) if self.variances is None else np.broadcast_to(
            np.asarray(self.variances, dtype=float), (K,)).copy()
        w = np.ones(K) if self.weights is None else np.asarray(self.weights, dtype=float).copy()
        if w.shape != (K,):
            raise ValueError("one weight per component required")
        if np.any(var <= 0) or not np.all(np.isfinite(var)):
            raise ValueError("component variances must be positive")
        if np.any(w <= 0):
            raise ValueError("component weights must be positive")
        w = w / w.sum()
        for a in (means, var, w):
            a.setflags(write=False)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "variances", var)
        object.__setattr__(self, "weights", w)

    @property
    def n_components(self) -> int:
        return self.means.shape[0]

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def sample(self, n: int, rng: np.random.Generator) -> Dataset:
        """Draw ``n`` items; labels hold the generating component index."""
        if n < 1:
            raise ValueError("n must be >= 1")
        comp = rng.choice(self.n_components, size=n, p=self.weights)
        noise = rng.standard_normal((n, self.dim))
        X = self.means[comp] + np.sqrt(self.variances[comp])[:, None] * noise
        return Dataset(X, comp.astype(np.int64), label_name="component")

    __call__ = sample


def triangle_mixture(side: float = 2.5, n_components: int = 3, variance: float = 1.0) -> GaussianMixtureSpec:
    """Equally weighted components on a regular polygon with the given side length.

    With the defaults: three unit-variance Gaussians on an equilateral
    triangle with side 2.5, the default synthetic dataset. Side 2.5 leaves
    enough overlap between components that a k-means partition has a visible
    band of weak points.
    """
    if n_components == 1:
        return GaussianMixtureSpec(np.zeros((1, 2)), [variance])
    radius = side / (2 * np.sin(np.pi / n_components))
    angles = np.pi / 2 + 2 * np.pi * np.arange(n_components) / n_components
    means = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    return GaussianMixtureSpec(means, np.full(n_components, variance))


def generate_gaussian_mixture(spec: GaussianMixtureSpec, n: int, seed) -> Dataset:
    """Draw ``n`` i.i.d. items from ``spec``; identical seeds give identical data."""
    return spec.sample(n, np.random.default_rng(seed))


def substream(seed, *key: int) -> np.random.Generator:
    """Independent generator derived from ``(seed, *key)``.

    Used to give each bootstrap iteration (or each pair in the direct
    estimator) its own stream, so the work split does not change results.
    """
    if isinstance(seed, np.random.SeedSequence):
        seed = seed.entropy
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


def bootstrap_indices(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` indices drawn uniformly with replacement from ``range(n)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return rng.integers(0, n, size=n)


def distinct_fraction(n: int) -> float:
    """Probability that a given item appears in a bootstrap sample of size ``n``."""
    return 1.0 - (1.0 - 1.0 / n) ** n
