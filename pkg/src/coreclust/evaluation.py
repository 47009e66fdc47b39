"""Purity reports and core/weak agreement between two core clusterings."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .corecluster import CoreClusteringResult, weak_fraction


def contingency(assignment, labels, include=None) -> np.ndarray:
    """Counts of (cluster, class) over the included items; rows follow sorted cluster index."""
    assignment = np.asarray(assignment)
    labels = np.asarray(labels)
    if assignment.shape != labels.shape:
        raise ValueError("assignment and labels differ in length")
    mask = np.ones(len(assignment), bool)
    if include is not None:
        include = np.asarray(sorted(include) if isinstance(include, (set, frozenset)) else include)
        if include.dtype == bool:
            mask = include
        else:
            include = include.astype(np.int64)
            if np.any((include < 0) | (include >= len(assignment))):
                raise IndexError("include contains ids outside the dataset")
            mask = np.zeros(len(assignment), bool)
            mask[include] = True
    if not mask.any():
        raise ValueError("purity of an empty item set is undefined")
    _, ci = np.unique(assignment[mask], return_inverse=True)
    _, li = np.unique(labels[mask], return_inverse=True)
    table = np.zeros((ci.max() + 1, li.max() + 1), np.int64)
    np.add.at(table, (ci, li), 1)
    return table


def purity(assignment, labels, include=None) -> float:
    """Share of items that belong to the majority class of their cluster."""
    table = contingency(assignment, labels, include)
    return float(table.max(axis=1).sum() / table.sum())


@dataclass(frozen=True)
class PurityReport:
    purity_original: float
    purity_core: float
    weak_fraction: float
    original_counts: np.ndarray
    core_counts: np.ndarray

    def row(self, dataset: str = "", algorithm: str = "") -> list:
        return [dataset, algorithm, f"{self.purity_original:.6f}",
                f"{self.purity_core:.6f}", f"{self.weak_fraction:.6f}"]


REPORT_HEADER = ["dataset", "algorithm", "P_o", "P_c", "w"]
AGREEMENT_HEADER = ["a", "b", "c", "d"]


def report(result: CoreClusteringResult, labels=None) -> PurityReport:
    """Purity of the original clustering, purity of the cores, and weak fraction.

    Both purities use the original cluster index; the core purity counts core
    members only. Trimmed items are left out of both.
    """
    labels = result.truth if labels is None else np.asarray(labels)
    if labels is None:
        raise ValueError("purity needs ground-truth labels")
    if len(labels) != result.n:
        raise ValueError("labels do not match the result's dataset size")
    untrimmed = np.flatnonzero(~result.original.trimmed)
    core = np.array(sorted(result.core_ids), dtype=np.int64)
    orig_counts = contingency(result.original.labels, labels, untrimmed)
    core_counts = contingency(result.original.labels, labels, core)
    return PurityReport(
        float(orig_counts.max(axis=1).sum() / orig_counts.sum()),
        float(core_counts.max(axis=1).sum() / core_counts.sum()),
        weak_fraction(result),
        orig_counts,
        core_counts,
    )


@dataclass(frozen=True)
class AgreementMatrix:
    """Cross-tabulation of core/weak status: rows first result, columns second."""

    a: int  # core, core
    b: int  # core, weak
    c: int  # weak, core
    d: int  # weak, weak

    @property
    def total(self) -> int:
        return self.a + self.b + self.c + self.d

    @property
    def discordant_fraction(self) -> float:
        return (self.b + self.c) / self.total if self.total else 0.0

    def row(self) -> list[int]:
        return [self.a, self.b, self.c, self.d]


def agreement(r1: CoreClusteringResult, r2: CoreClusteringResult) -> AgreementMatrix:
    """Core/weak agreement over items trimmed by neither result."""
    if r1.n != r2.n or (r1.fingerprint and r2.fingerprint and r1.fingerprint != r2.fingerprint):
        raise ValueError("results were computed on different datasets")
    keep = ~(r1.original.trimmed | r2.original.trimmed)
    s1 = r1.status()[keep] == "core"
    s2 = r2.status()[keep] == "core"
    return AgreementMatrix(int(np.sum(s1 & s2)), int(np.sum(s1 & ~s2)),
                           int(np.sum(~s1 & s2)), int(np.sum(~s1 & ~s2)))


def format_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()
