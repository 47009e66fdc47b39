"""Clustering functions: fit a dataset, emit one cluster index per item.

Four methods are available through :class:`ClusterConfig`:

``kmeanspp``
    k-means++ seeding followed by Lloyd iterations, best of ``restarts`` runs
    by within-cluster sum of squares.
``trimmed_kmeans``
    The same with a fixed fraction of the farthest items trimmed at every
    concentration step.
``hierarchical``
    Agglomerative clustering on Euclidean distances cut at ``k`` clusters.
``nearest_centroid``
    A classifier used as a clustering function: class means fitted on the
    labels, items assigned to the nearest class mean.

Any other callable ``fit(data, rng)`` returning a :class:`FittedClustering`,
an :class:`Assignment` or a plain label vector can stand in for a config.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.cluster.hierarchy import linkage

from . import _kernels
from .dataset import Dataset

METHODS = ("kmeanspp", "hierarchical", "trimmed_kmeans", "nearest_centroid")
LINKAGES = ("complete", "single", "average")


class ClusteringError(RuntimeError):
    """A clustering function could not produce a partition for its input."""


class AssignmentUndefined(ClusteringError):
    """The fitted clustering has no rule for items outside its training data."""


@dataclass(frozen=True, eq=False)
class Assignment:
    """Cluster index per item plus a mask of items left out of every cluster.

    ``labels[i]`` is still filled for a trimmed item (its nearest centroid)
    but carries no membership.
    """

    labels: np.ndarray
    trimmed: np.ndarray = None

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64, copy=True)
        if labels.ndim != 1:
            raise ValueError("labels must be a vector")
        if np.any(labels < 0):
            raise ValueError("cluster indices must be non-negative")
        trimmed = (np.zeros(labels.shape, bool) if self.trimmed is None
                   else np.array(self.trimmed, dtype=bool, copy=True))
        if trimmed.shape != labels.shape:
            raise ValueError("trimmed mask must match labels")
        labels.setflags(write=False)
        trimmed.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "trimmed", trimmed)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @property
    def trimmed_ids(self) -> np.ndarray:
        return np.flatnonzero(self.trimmed)

    @property
    def clusters(self) -> np.ndarray:
        """Sorted cluster indices that own at least one untrimmed item."""
        return np.unique(self.labels[~self.trimmed])

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero((self.labels == c) & ~self.trimmed)

    def same_cluster(self, i: int, j: int) -> bool:
        return (self.labels[i] == self.labels[j]
                and not self.trimmed[i] and not self.trimmed[j])

    def __eq__(self, other):
        if not isinstance(other, Assignment):
            return NotImplemented
        return (np.array_equal(self.labels, other.labels)
                and np.array_equal(self.trimmed, other.trimmed))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class FittedClustering:
    assignment: Assignment
    centroids: np.ndarray | None = None
    objective: float | None = None
    method_tag: str = ""

    def __eq__(self, other):
        if not isinstance(other, FittedClustering):
            return NotImplemented
        same_c = (self.centroids is None and other.centroids is None) or (
            self.centroids is not None and other.centroids is not None
            and np.array_equal(self.centroids, other.centroids))
        return (self.assignment == other.assignment and same_c
                and self.objective == other.objective
                and self.method_tag == other.method_tag)

    __hash__ = None

    @property
    def labels(self) -> np.ndarray:
        return self.assignment.labels

    def predict(self, x) -> int:
        return assign_point(self, x)


@dataclass(frozen=True)
class ClusterConfig:
    """Method choice and hyperparameters of a clustering function."""

    method: str = "kmeanspp"
    k: int = 3
    restarts: int = 10
    linkage: str = "complete"
    trim_fraction: float = 0.05
    max_iter: int = 100

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.linkage not in LINKAGES:
            raise ValueError(f"unknown linkage {self.linkage!r}; choose from {LINKAGES}")
        if not 0.0 <= self.trim_fraction < 0.5:
            raise ValueError("trim_fraction must lie in [0, 0.5)")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    @property
    def tag(self) -> str:
        if self.method == "kmeanspp":
            return f"kmeanspp(k={self.k},restarts={self.restarts})"
        if self.method == "trimmed_kmeans":
            return f"trimmed_kmeans(k={self.k},restarts={self.restarts},trim={self.trim_fraction})"
        if self.method == "hierarchical":
            return f"hierarchical(k={self.k},linkage={self.linkage})"
        return "nearest_centroid"

    @property
    def stochastic(self) -> bool:
        return self.method in ("kmeanspp", "trimmed_kmeans")

    def fit(self, data, rng: np.random.Generator | None = None) -> FittedClustering:
        if self.stochastic and rng is None:
            raise ValueError(f"{self.method} needs a random generator")
        if self.method == "kmeanspp":
            return kmeans_fit(data, self, rng)
        if self.method == "trimmed_kmeans":
            return trimmed_kmeans_fit(data, self, rng)
        if self.method == "hierarchical":
            return hierarchical_fit(data, self)
        return nearest_centroid_fit(data, self)

    __call__ = fit


ClusterFunction = Callable[..., Union[FittedClustering, Assignment, np.ndarray]]


def as_assignment(result) -> Assignment:
    """Normalise whatever a clustering function returned to an Assignment."""
    if isinstance(result, FittedClustering):
        return result.assignment
    if isinstance(result, Assignment):
        return result
    return Assignment(np.asarray(result))


def _features(data) -> np.ndarray:
    X = data.features if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return np.ascontiguousarray(X, dtype=float)


def kmeanspp_init(data, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeds as a k x d matrix of data rows.

    The first seed is a uniformly random item; each further seed is drawn with
    probability proportional to the squared distance to the nearest seed so
    far. Duplicated rows (as in bootstrap samples) carry zero mass once seeded;
    when no mass is left, remaining seeds are drawn uniformly from the rows not
    chosen yet.
    """
    X = _features(data)
    if not 1 <= k <= X.shape[0]:
        raise ClusteringError(f"k={k} must lie in [1, n={X.shape[0]}]")
    idx = _kernels.seed_pp(X, k, rng.random(k))
    return X[idx].copy()


def _n_trim(n: int, fraction: float) -> int:
    # guard against 0.05 * 200 = 10.000000000000002
    return int(math.ceil(round(fraction * n, 9)))


def _centroid_fit(X, cfg: ClusterConfig, h: int, rng) -> FittedClustering:
    U = rng.random((cfg.restarts, cfg.k))
    labels, trimmed, C, obj, _ = _kernels.best_of_restarts(X, cfg.k, h, U, cfg.max_iter)
    return FittedClustering(Assignment(labels, trimmed), C, float(obj), cfg.tag)


def kmeans_fit(data, cfg: ClusterConfig, rng: np.random.Generator) -> FittedClustering:
    """Best of ``cfg.restarts`` k-means++ / Lloyd runs by within-cluster sum of squares.

    Lloyd iterations stop at an exact assignment fixpoint or after
    ``cfg.max_iter`` updates. A centroid that loses all its items is moved to
    the item farthest from its own centroid.
    """
    X = _features(data)
    if cfg.k > X.shape[0]:
        raise ClusteringError(f"k={cfg.k} exceeds n={X.shape[0]}")
    return _centroid_fit(X, cfg, 0, rng)


def trimmed_kmeans_fit(data, cfg: ClusterConfig, rng: np.random.Generator) -> FittedClustering:
    """Trimmed k-means with ``ceil(trim_fraction * n)`` items left out.

    Each concentration step assigns items to the nearest centroid, trims the
    farthest items and recomputes centroids on the rest. The k-means++
    seeding gives no mass to the items that are currently farthest from the
    seeds, as many as will be trimmed. Restarts and random number consumption
    match :func:`kmeans_fit`, so a zero trim fraction reproduces it exactly.
    """
    X = _features(data)
    h = _n_trim(X.shape[0], cfg.trim_fraction)
    if h + cfg.k > X.shape[0]:
        raise ClusteringError(f"cannot trim {h} of {X.shape[0]} items and keep {cfg.k} clusters")
    return _centroid_fit(X, cfg, h, rng)


def lloyd_trace(data, centroids, h: int = 0, max_iter: int = 100):
    """Run one concentration from given centroids and return the full objective trace.

    Diagnostic helper; the fit functions use the same kernel.
    """
    X = _features(data)
    C = np.array(centroids, dtype=float, copy=True)
    trace = np.empty(max_iter + 1)
    labels, trimmed, obj, steps = _kernels.concentrate(X, C, h, max_iter, trace)
    return labels, trimmed, C, trace[:steps].copy()


def _relabel_first_seen(roots: np.ndarray) -> np.ndarray:
    _, first, inverse = np.unique(roots, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse]


def hierarchical_fit(data, cfg: ClusterConfig, rng=None) -> FittedClustering:
    """Agglomerative clustering cut to exactly ``cfg.k`` clusters.

    The merge tree comes from ``scipy.cluster.hierarchy.linkage``; the cut
    applies its first ``n - k`` merges. Cluster indices are numbered by the
    first item of each cluster. There is no rule for unseen items.
    """
    X = _features(data)
    n = X.shape[0]
    if cfg.k > n:
        raise ClusteringError(f"k={cfg.k} exceeds n={n}")
    parent = np.arange(2 * n - 1)
    if n > 1:
        Z = linkage(X, method=cfg.linkage, metric="euclidean")
        for step in range(n - cfg.k):
            a, b = int(Z[step, 0]), int(Z[step, 1])
            parent[a] = parent[b] = n + step
    roots = np.arange(n)
    # follow parents to each item's cluster root
    while True:
        up = parent[roots]
        if np.array_equal(up, roots):
            break
        roots = up
    return FittedClustering(Assignment(_relabel_first_seen(roots)), None, None, cfg.tag)


def nearest_centroid_fit(data: Dataset, cfg: ClusterConfig | None = None, rng=None) -> FittedClustering:
    """Class means as centroids; each item goes to the nearest class mean.

    Cluster index ``c`` is the ``c``-th class in sorted label order. Ties
    between equidistant class means go to the lower index.
    """
    if not isinstance(data, Dataset) or data.labels is None:
        raise ClusteringError("nearest_centroid needs a labelled dataset")
    X = _features(data)
    classes, y = np.unique(data.labels, return_inverse=True)
    C = np.zeros((len(classes), X.shape[1]))
    np.add.at(C, y, X)
    C /= np.bincount(y, minlength=len(classes))[:, None]
    labels = _nearest(X, C)
    obj = float(((X - C[labels]) ** 2).sum())
    return FittedClustering(Assignment(labels), C, obj, "nearest_centroid")


def _nearest(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    d2 = ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)


def assign_point(fitted: FittedClustering, x) -> int:
    """Index of the nearest centroid to ``x``; ties to the lowest index.

    Raises :class:`AssignmentUndefined` for methods without centroids.
    """
    if fitted.centroids is None:
        raise AssignmentUndefined(f"assignment undefined for unseen items ({fitted.method_tag})")
    x = np.asarray(x, dtype=float).reshape(1, -1)
    if x.shape[1] != fitted.centroids.shape[1]:
        raise ValueError("dimension mismatch")
    return int(_nearest(x, fitted.centroids)[0])
