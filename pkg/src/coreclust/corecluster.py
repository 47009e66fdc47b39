"""Core clustering: reference clustering, co-occurrence estimation, per-cluster cliques."""
from __future__ import annotations

import csv
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .clique import CoocGraph, DEFAULT_MAX_VERTICES, build_threshold_graph, largest_maximal_clique
from .clustering import Assignment, ClusterConfig, ClusteringError, as_assignment
from .cooccurrence import (
    MAX_ATTEMPTS,
    CoocEstimate,
    cooc_bootstrap,
    cooc_direct,
    within_cluster_pairs,
)
from .dataset import STREAM_REFERENCE, Dataset, substream

log = logging.getLogger(__name__)

ESTIMATORS = ("bootstrap", "direct")
STATUSES = ("core", "weak", "trimmed")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CoreConfig:
    alpha: float = 0.1
    iterations: int = 1000
    estimator: str = "bootstrap"
    cluster_config: ClusterConfig = field(default_factory=ClusterConfig)
    seed: int = 0
    direct_pairs: str = "within"

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError("alpha must lie in [0, 1]")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.estimator not in ESTIMATORS:
            raise ConfigError(f"estimator must be one of {ESTIMATORS}")
        if self.direct_pairs not in ("within", "all"):
            raise ConfigError("direct_pairs must be 'within' or 'all'")

    def to_dict(self) -> dict:
        cc = self.cluster_config
        cluster = asdict(cc) if isinstance(cc, ClusterConfig) else {"method": getattr(cc, "__name__", repr(cc))}
        return {
            "alpha": self.alpha,
            "iterations": self.iterations,
            "estimator": self.estimator,
            "seed": self.seed,
            "direct_pairs": self.direct_pairs,
            "cluster": cluster,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CoreConfig":
        return cls(
            alpha=d["alpha"],
            iterations=d["iterations"],
            estimator=d["estimator"],
            cluster_config=ClusterConfig(**d["cluster"]),
            seed=d["seed"],
            direct_pairs=d.get("direct_pairs", "within"),
        )


@dataclass(frozen=True, eq=False)
class CoreClusteringResult:
    """Outcome of a core clustering run.

    ``cores[c]`` is the core of original cluster ``clusters[c]``. ``cooc`` is
    ``None`` for results read back from JSON.
    """

    original: Assignment
    clusters: tuple[int, ...]
    cores: tuple[frozenset, ...]
    weak: frozenset
    trimmed: frozenset
    alpha: float
    cooc: CoocEstimate | None = None
    config: dict = field(default_factory=dict)
    m_effective: int = 0
    fingerprint: str = ""
    truth: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.original.n

    def status(self) -> np.ndarray:
        """Per-item status: ``core``, ``weak`` or ``trimmed``."""
        s = np.full(self.n, "weak", dtype=object)
        for core in self.cores:
            s[list(core)] = "core"
        s[list(self.trimmed)] = "trimmed"
        return s

    @property
    def core_ids(self) -> frozenset:
        return frozenset().union(*self.cores)

    @property
    def core_sizes(self) -> list[int]:
        return [len(c) for c in self.cores]

    def validate(self) -> None:
        """Assert the defining properties of cores and weak points.

        Cores lie inside their original cluster, every pair in a core clears
        the threshold, no outside member of the cluster could join a core,
        weak points are exactly the untrimmed items outside every core, and
        there is one core per original cluster.
        """
        untrimmed = frozenset(np.flatnonzero(~self.original.trimmed).tolist())
        assert self.trimmed == frozenset(self.original.trimmed_ids.tolist())
        assert len(self.cores) == len(self.clusters) == len(self.original.clusters)
        seen = set()
        threshold = 1.0 - self.alpha
        for c, core in zip(self.clusters, self.cores):
            members = set(self.original.members(c).tolist())
            assert core and core <= members, f"core of cluster {c} leaves the cluster"
            assert not (seen & core), "cores overlap"
            seen |= core
            if self.cooc is None:
                continue
            P = self.cooc.p
            ids = sorted(core)
            sub = P[np.ix_(ids, ids)]
            assert np.all(sub >= threshold), f"core of cluster {c} has a pair below {threshold}"
            for v in members - core:
                assert not np.all(P[v, ids] >= threshold), f"core of cluster {c} is not maximal"
        assert self.weak == untrimmed - seen
        assert not (self.weak & self.trimmed)

    # --- serialisation -------------------------------------------------
    def to_json(self) -> dict:
        status = self.status()
        items = []
        for i in range(self.n):
            rec = {"id": i, "original_cluster": int(self.original.labels[i]), "status": status[i]}
            if self.truth is not None:
                rec["label"] = _plain(self.truth[i])
            items.append(rec)
        return {
            "software": {"name": "coreclust", "version": __version__},
            "config": self.config,
            "dataset": {"n": self.n, "fingerprint": self.fingerprint},
            "alpha": self.alpha,
            "m_effective": self.m_effective,
            "clusters": list(map(int, self.clusters)),
            "core_sizes": self.core_sizes,
            "weak_fraction": weak_fraction(self),
            "items": items,
        }

    def save_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def from_json(cls, doc: dict) -> "CoreClusteringResult":
        items = sorted(doc["items"], key=lambda r: r["id"])
        labels = np.array([r["original_cluster"] for r in items], dtype=np.int64)
        status = [r["status"] for r in items]
        trimmed = np.array([s == "trimmed" for s in status])
        clusters = tuple(doc["clusters"])
        cores = tuple(frozenset(i for i, r in enumerate(items)
                                if r["status"] == "core" and r["original_cluster"] == c) for c in clusters)
        truth = None
        if items and "label" in items[0]:
            truth = np.array([r["label"] for r in items])
        return cls(
            original=Assignment(labels, trimmed),
            clusters=clusters,
            cores=cores,
            weak=frozenset(i for i, s in enumerate(status) if s == "weak"),
            trimmed=frozenset(np.flatnonzero(trimmed).tolist()),
            alpha=doc["alpha"],
            cooc=None,
            config=doc.get("config", {}),
            m_effective=doc.get("m_effective", 0),
            fingerprint=doc.get("dataset", {}).get("fingerprint", ""),
            truth=truth,
        )

    @classmethod
    def load_json(cls, path) -> "CoreClusteringResult":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))

    def save_items_csv(self, path, data: Dataset | None = None) -> None:
        """Per-item rows ``id, <features>, [label], original_cluster, status``."""
        status = self.status()
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            header = ["id"]
            if data is not None:
                header += list(data.feature_names)
            if self.truth is not None:
                header.append("label")
            header += ["original_cluster", "status"]
            w.writerow(header)
            for i in range(self.n):
                row = [i]
                if data is not None:
                    row += [repr(float(v)) for v in data.features[i]]
                if self.truth is not None:
                    row.append(self.truth[i])
                row += [int(self.original.labels[i]), status[i]]
                w.writerow(row)


def _plain(v):
    return v.item() if isinstance(v, np.generic) else v


def _reference_fit(data: Dataset, fit, seed) -> Assignment:
    rng = substream(seed, STREAM_REFERENCE)
    last = None
    for _ in range(MAX_ATTEMPTS):
        try:
            return as_assignment(fit(data, rng))
        except ClusteringError as exc:
            last = exc
    raise ClusteringError(f"reference clustering failed {MAX_ATTEMPTS} times: {last}")


def _solve(P_sub: np.ndarray, members, alpha, max_vertices):
    # P_sub is the members x members block, so the graph uses local positions
    g = build_threshold_graph(P_sub, range(len(members)), alpha)
    local = largest_maximal_clique(g, max_vertices)
    return frozenset(int(members[i]) for i in local)


def find_cores(cooc: CoocEstimate, original: Assignment, alpha: float, workers: int = 1,
               max_vertices: int = DEFAULT_MAX_VERTICES) -> tuple[tuple[int, ...], tuple[frozenset, ...]]:
    """Largest maximal clique of the threshold graph inside each original cluster."""
    clusters = tuple(int(c) for c in original.clusters)
    groups = [original.members(c) for c in clusters]
    jobs = [(cooc.p[np.ix_(g, g)], g.tolist(), alpha, max_vertices) for g in groups]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cores = list(pool.map(_solve, *zip(*jobs)))
    else:
        cores = [_solve(*job) for job in jobs]
    return clusters, tuple(cores)


def core_clustering(data: Dataset, cfg: CoreConfig, generator=None, workers: int = 1) -> CoreClusteringResult:
    """Core clusters of ``data`` under the clustering function in ``cfg``.

    The reference clustering is one fit on the full dataset. Co-occurrence
    probabilities come from the bootstrap, or from ``generator`` (a sampler
    ``generator(count, rng) -> Dataset`` of the true distribution) when
    ``cfg.estimator == "direct"``. The direct estimator evaluates only
    within-cluster pairs unless ``cfg.direct_pairs == "all"``.
    """
    if data.n < 2:
        raise ValueError("need at least two items")
    if cfg.estimator == "direct" and generator is None:
        raise ConfigError("the direct estimator needs a generator for the data distribution")
    fit = cfg.cluster_config
    t0 = time.perf_counter()
    original = _reference_fit(data, fit, cfg.seed)
    if original.n != data.n:
        raise ValueError("clustering returned the wrong number of labels")

    if cfg.estimator == "bootstrap":
        cooc, counters = cooc_bootstrap(data, fit, cfg.iterations, cfg.seed, workers)
        m_eff = counters.m_effective
    else:
        pairs = None
        if cfg.direct_pairs == "within":
            pairs = within_cluster_pairs(original.members(c) for c in original.clusters)
        cooc, counters = cooc_direct(data, generator, fit, cfg.iterations, cfg.seed, pairs, workers)
        m_eff = counters.m_effective

    clusters, cores = find_cores(cooc, original, cfg.alpha, workers)
    covered = frozenset().union(*cores)
    untrimmed = frozenset(np.flatnonzero(~original.trimmed).tolist())
    result = CoreClusteringResult(
        original=original,
        clusters=clusters,
        cores=cores,
        weak=untrimmed - covered,
        trimmed=frozenset(original.trimmed_ids.tolist()),
        alpha=cfg.alpha,
        cooc=cooc,
        config=cfg.to_dict(),
        m_effective=m_eff,
        fingerprint=data.fingerprint(),
        truth=data.labels,
    )
    result.validate()
    log.info("core clustering: n=%d, %d clusters, weak fraction %.3f, %.2fs",
             data.n, len(clusters), weak_fraction(result), time.perf_counter() - t0)
    return result


def weak_fraction(result: CoreClusteringResult) -> float:
    """Weak points over untrimmed items."""
    denom = result.n - len(result.trimmed)
    return len(result.weak) / denom if denom else 0.0
