"""Pairwise co-occurrence probabilities across re-clusterings.

Two estimators are provided. :func:`cooc_bootstrap` re-clusters bootstrap
resamples of the data. :func:`cooc_direct` re-clusters each pair together with
fresh draws from a known generator. Both accumulate exact integer counters
(:class:`CoocCounters`). Counters from disjoint chunks of work merge by plain
addition, so the result does not depend on how the work was split.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .clustering import ClusteringError, as_assignment
from .dataset import (
    STREAM_BOOTSTRAP,
    STREAM_DIRECT,
    Dataset,
    bootstrap_indices,
    distinct_fraction,
    substream,
)

log = logging.getLogger(__name__)

MAX_ATTEMPTS = 5


class EstimatorError(RuntimeError):
    """The estimator could not complete a single iteration."""


@dataclass(frozen=True, eq=False)
class CoocCounters:
    """Raw counts over unordered pairs of distinct items.

    ``a[i, j]``: iterations in which i and j shared a cluster.
    ``b[i, j]``: iterations in which both were present (bootstrap) or
    iterations completed for the pair (direct). Diagonals stay zero.
    """

    a: np.ndarray
    b: np.ndarray
    m_effective: int = 0

    def __post_init__(self):
        if self.a.shape != self.b.shape or self.a.ndim != 2 or self.a.shape[0] != self.a.shape[1]:
            raise ValueError("counter matrices must be square and of equal shape")

    @classmethod
    def zeros(cls, n: int) -> "CoocCounters":
        return cls(np.zeros((n, n), np.int64), np.zeros((n, n), np.int64), 0)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def __eq__(self, other):
        if not isinstance(other, CoocCounters):
            return NotImplemented
        return (self.m_effective == other.m_effective
                and np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b))

    __hash__ = None


def merge_counters(x: CoocCounters, y: CoocCounters) -> CoocCounters:
    if x.a.shape != y.a.shape:
        raise ValueError(f"cannot merge counters of size {x.n} and {y.n}")
    return CoocCounters(x.a + y.a, x.b + y.b, x.m_effective + y.m_effective)


def merge_all(parts: Iterable[CoocCounters], n: int) -> CoocCounters:
    total = CoocCounters.zeros(n)
    for part in parts:
        total = merge_counters(total, part)
    return total


@dataclass(frozen=True, eq=False)
class CoocEstimate:
    """Symmetric co-occurrence probabilities with a unit diagonal."""

    p: np.ndarray
    method_tag: str

    @property
    def n(self) -> int:
        return self.p.shape[0]

    def save_matrix(self, path) -> None:
        np.savetxt(path, self.p, delimiter=",", fmt="%.17g")

    def save_edges(self, path, threshold: float) -> int:
        """Write ``i,j,p`` rows for ``i < j`` with ``p >= threshold``; returns the row count."""
        i, j = np.nonzero(np.triu(self.p >= threshold, k=1))
        with Path(path).open("w", encoding="utf-8") as fh:
            fh.write("i,j,p\n")
            for a, b in zip(i, j):
                fh.write(f"{a},{b},{float(self.p[a, b])!r}\n")
        return len(i)


def bootstrap_estimate(counters: CoocCounters) -> CoocEstimate:
    """``(a + 1/n) / (b + 1)`` off the diagonal, 1 on it."""
    n = counters.n
    p = (counters.a + 1.0 / n) / (counters.b + 1.0)
    np.fill_diagonal(p, 1.0)
    return CoocEstimate(p, "bootstrap")


def direct_estimate(counters: CoocCounters) -> CoocEstimate:
    """``a / b`` for evaluated pairs; pairs never evaluated are reported as 0."""
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(counters.b > 0, counters.a / np.maximum(counters.b, 1), 0.0)
    np.fill_diagonal(p, 1.0)
    return CoocEstimate(p, "direct")


def _fit_with_retry(fit, make_sample, rng):
    """Fit freshly drawn samples until one clusters; ``None`` after MAX_ATTEMPTS failures."""
    for _ in range(MAX_ATTEMPTS):
        sample = make_sample()
        try:
            return sample, as_assignment(fit(sample[1], rng))
        except ClusteringError as exc:
            log.debug("clustering failed on a resample: %s", exc)
    return None


def bootstrap_chunk(data: Dataset, fit, seed, start: int, stop: int) -> CoocCounters:
    """Counters for bootstrap iterations ``start .. stop-1`` of the stream ``seed``."""
    n = data.n
    a = np.zeros((n, n), np.int64)
    b = np.zeros((n, n), np.int64)
    done = 0
    for it in range(start, stop):
        rng = substream(seed, STREAM_BOOTSTRAP, it)

        def draw():
            idx = bootstrap_indices(n, rng)
            return idx, data.take(idx)

        got = _fit_with_retry(fit, draw, rng)
        if got is None:
            log.warning("bootstrap iteration %d skipped after %d failed attempts", it, MAX_ATTEMPTS)
            continue
        (idx, _), assign = got
        if assign.n != n:
            raise ValueError(f"clustering returned {assign.n} labels for {n} items")
        # first occurrence of each original id in the resample
        ids, pos = np.unique(idx, return_index=True)
        lab = assign.labels[pos]
        kept = ~assign.trimmed[pos]
        same = (lab[:, None] == lab[None, :]) & kept[:, None] & kept[None, :]
        grid = np.ix_(ids, ids)
        b[grid] += 1
        a[grid] += same
        done += 1
    np.fill_diagonal(a, 0)
    np.fill_diagonal(b, 0)
    return CoocCounters(a, b, done)


def _chunks(total: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, total))
    edges = np.linspace(0, total, parts + 1).round().astype(int)
    return [(int(lo), int(hi)) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]


def cooc_bootstrap(data: Dataset, fit, m: int, seed, workers: int = 1):
    """Bootstrap co-occurrence probabilities.

    Parameters
    ----------
    data : Dataset
        The original items; ``data.n >= 2``.
    fit : callable
        Clustering function ``fit(dataset, rng)``; a :class:`ClusterConfig`
        works. Raising :class:`ClusteringError` triggers a fresh resample, up
        to 5 attempts, after which the iteration is skipped.
    m : int
        Number of bootstrap iterations.
    seed : int
        Master seed. Iteration ``t`` draws from its own stream derived from
        ``(seed, t)``, so ``workers`` never changes the result.
    workers : int
        Processes to spread iterations over (``fit`` must be picklable).

    Returns
    -------
    (CoocEstimate, CoocCounters)
    """
    if data.n < 2:
        raise ValueError("need at least two items")
    if m < 1:
        raise ValueError("m must be >= 1")
    spans = _chunks(m, workers)
    if workers > 1 and len(spans) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(bootstrap_chunk, *zip(*[(data, fit, seed, lo, hi) for lo, hi in spans])))
    else:
        parts = [bootstrap_chunk(data, fit, seed, lo, hi) for lo, hi in spans]
    counters = merge_all(parts, data.n)
    if counters.m_effective == 0:
        raise EstimatorError("every bootstrap iteration failed to cluster")
    return bootstrap_estimate(counters), counters


def all_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n - 1) for j in range(i + 1, n)]


def within_cluster_pairs(groups: Iterable[Sequence[int]]) -> list[tuple[int, int]]:
    pairs = []
    for g in groups:
        g = sorted(int(v) for v in g)
        pairs.extend((g[x], g[y]) for x in range(len(g) - 1) for y in range(x + 1, len(g)))
    return sorted(pairs)


def _pair_rows(data: Dataset, i: int, j: int) -> Dataset:
    return data.take([i, j])


def _concat(head: Dataset, tail: Dataset) -> Dataset:
    if head.d != tail.d:
        raise ValueError(f"generator produced {tail.d}-dimensional items, data has {head.d}")
    labels = None
    if head.labels is not None and tail.labels is not None:
        labels = np.concatenate([head.labels, tail.labels])
    return Dataset(np.vstack([head.features, tail.features]), labels, head.feature_names)


def direct_chunk(data: Dataset, generator, fit, m: int, seed, pairs) -> CoocCounters:
    n = data.n
    a = np.zeros((n, n), np.int64)
    b = np.zeros((n, n), np.int64)
    for i, j in pairs:
        rng = substream(seed, STREAM_DIRECT, i, j)
        head = _pair_rows(data, i, j)
        hits = done = 0
        for _ in range(m):
            got = _fit_with_retry(fit, lambda: (None, _concat(head, generator(n - 2, rng))), rng)
            if got is None:
                continue
            assign = got[1]
            hits += assign.same_cluster(0, 1)
            done += 1
        a[i, j] = a[j, i] = hits
        b[i, j] = b[j, i] = done
    return CoocCounters(a, b, m)


def cooc_direct(data: Dataset, generator: Callable, fit, m: int, seed,
                pairs: Sequence[tuple[int, int]] | None = None, workers: int = 1):
    """Co-occurrence probabilities by sampling from a known distribution.

    For each pair ``(i, j)``, ``m`` datasets are formed from the two items and
    ``n - 2`` fresh draws ``generator(n - 2, rng)``; the probability is the
    fraction of clusterings placing both items in the same cluster. ``pairs``
    restricts the work (e.g. to within-cluster pairs); by default every pair
    is evaluated. Pairs not evaluated get probability 0.

    Each pair draws from the stream ``(seed, i, j)``; ``workers`` does not
    change the result.
    """
    n = data.n
    if n < 2:
        raise ValueError("need at least two items")
    if m < 1:
        raise ValueError("m must be >= 1")
    pairs = all_pairs(n) if pairs is None else sorted((min(i, j), max(i, j)) for i, j in pairs)
    if any(i == j or not 0 <= i < n or not 0 <= j < n for i, j in pairs):
        raise ValueError("pairs must be distinct valid item ids")
    probe = generator(1, np.random.default_rng(0))
    if probe.d != data.d:
        raise ValueError(f"generator produced {probe.d}-dimensional items, data has {data.d}")
    if workers > 1 and len(pairs) > 1:
        spans = _chunks(len(pairs), workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(direct_chunk, *zip(*[
                (data, generator, fit, m, seed, pairs[lo:hi]) for lo, hi in spans])))
    else:
        parts = [direct_chunk(data, generator, fit, m, seed, pairs)]
    a = sum(p.a for p in parts) if parts else np.zeros((n, n), np.int64)
    b = sum(p.b for p in parts) if parts else np.zeros((n, n), np.int64)
    counters = CoocCounters(a, b, m)
    if pairs and not np.any(b[tuple(np.array(pairs).T)] > 0):
        raise EstimatorError("no direct-sampling iteration clustered successfully")
    return direct_estimate(counters), counters


def required_samples(p: float, sigma: float) -> int:
    """Smallest N with binomial standard error sqrt(p(1-p)/N) <= sigma."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    # round before ceil: 0.09 / 1e-4 evaluates to 900.0000000000001
    return int(math.ceil(round(p * (1.0 - p) / sigma ** 2, 9)))


def pair_coverage(n: int) -> float:
    """Probability that both items of a given pair land in a bootstrap sample, ``p_s(n)**2``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return distinct_fraction(n) ** 2


def bootstrap_sigma(p: float, m: int, n: int) -> float:
    """Standard error of a bootstrap co-occurrence probability after ``m`` iterations."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    return math.sqrt(p * (1.0 - p) / (m * pair_coverage(n)))
