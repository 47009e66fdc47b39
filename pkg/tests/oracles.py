"""Reference computations used as test oracles, written independently of the package."""
import itertools

import numpy as np

# one "PASS/FAIL ..." line per acceptance criterion, printed at session end
ACCEPTANCE_LINES: list[str] = []


def sign_rule(data, rng=None):
    """Deterministic, data-independent clustering: the sign of the first coordinate."""
    return (np.asarray(data.features)[:, 0] > 0).astype(np.int64)


def single_cluster(data, rng=None):
    return np.zeros(data.n, np.int64)


def enumerate_bootstrap(data, fit):
    """Exact expected co-occurrence counters per iteration over all n**n index vectors.

    Returns (Ea, Eb): the expected increment of the "same cluster" and "both
    present" counters per bootstrap iteration, counting each original id at
    its first occurrence.
    """
    n = data.n
    Ea = np.zeros((n, n))
    Eb = np.zeros((n, n))
    total = n ** n
    for idx in itertools.product(range(n), repeat=n):
        sub = data.take(list(idx))
        labels = fit(sub, None)
        labels = np.asarray(getattr(labels, "labels", labels))
        first = {}
        for pos, i in enumerate(idx):
            first.setdefault(i, pos)
        for i, j in itertools.permutations(first, 2):
            Eb[i, j] += 1
            if labels[first[i]] == labels[first[j]]:
                Ea[i, j] += 1
    return Ea / total, Eb / total


def exact_bootstrap_p(Ea, Eb, m, n):
    """Co-occurrence value the estimator converges to for m iterations."""
    p = (m * Ea + 1.0 / n) / (m * Eb + 1.0)
    np.fill_diagonal(p, 1.0)
    return p


def assert_core_definition(result, alpha=None):
    """Check cores, weak points and trimmed points against their set definitions."""
    alpha = result.alpha if alpha is None else alpha
    P = result.cooc.p
    labels = np.asarray(result.original.labels)
    trimmed = np.asarray(result.original.trimmed)
    n = len(labels)
    clusters = sorted(set(labels[~trimmed].tolist()))
    assert len(result.cores) == len(clusters), "one core per original cluster"
    union = set()
    for c, core in zip(result.clusters, result.cores):
        S = {i for i in range(n) if labels[i] == c and not trimmed[i]}
        core = set(core)
        assert core and core <= S, "core must be a non-empty subset of its cluster"
        for i, j in itertools.combinations(core, 2):
            assert P[i, j] >= 1 - alpha, "core pair below threshold"
        for v in S - core:
            assert not all(P[v, j] >= 1 - alpha for j in core), "core is not maximal"
        assert not union & core, "cores overlap"
        union |= core
    untrimmed = {i for i in range(n) if not trimmed[i]}
    assert set(result.weak) == untrimmed - union
    assert set(result.trimmed) == {i for i in range(n) if trimmed[i]}
