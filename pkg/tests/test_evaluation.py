import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coreclust import (
    Assignment,
    CoreClusteringResult,
    CoreConfig,
    agreement,
    core_clustering,
    load_iris,
    purity,
    report,
)
from coreclust.evaluation import AGREEMENT_HEADER, REPORT_HEADER, contingency, format_csv


def test_purity_examples():
    assert purity([0, 0, 1, 1], ["a", "a", "b", "b"]) == 1.0
    assert purity([0, 0, 0, 1, 1], ["A", "A", "B", "B", "B"]) == pytest.approx(0.8)
    iris = load_iris()
    assert purity(np.zeros(150, int), iris.labels) == pytest.approx(1 / 3)


def test_purity_empty_include():
    with pytest.raises(ValueError):
        purity([0, 1], [0, 1], include=[])
    with pytest.raises(ValueError):
        purity([0, 1], [0, 1], include=np.zeros(2, bool))


def test_contingency_counts():
    t = contingency([1, 1, 0, 0, 0], ["x", "y", "y", "y", "x"], include={0, 1, 2, 3})
    # rows: cluster 0, cluster 1; columns: x, y
    assert t.tolist() == [[0, 2], [1, 1]]


def naive_purity(assign, labels):
    clusters = {}
    for c, l in zip(assign, labels):
        clusters.setdefault(c, []).append(l)
    return sum(max(v.count(x) for x in set(v)) for v in clusters.values()) / len(assign)


@settings(max_examples=100)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 4)), min_size=1, max_size=60), st.randoms())
def test_purity_permutation_invariance(pairs, rnd):
    assign = [p[0] for p in pairs]
    labels = [p[1] for p in pairs]
    base = purity(assign, labels)
    assert base == pytest.approx(naive_purity(assign, labels), abs=1e-12)
    cperm = list(range(6))
    lperm = list(range(5))
    rnd.shuffle(cperm)
    rnd.shuffle(lperm)
    names = [f"class{v}" for v in lperm]
    assert purity([cperm[a] for a in assign], [names[l] for l in labels]) == pytest.approx(base, abs=1e-12)


@settings(max_examples=60)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 4)), min_size=1, max_size=60))
def test_purity_one_on_pure_subsets(pairs):
    assign = np.array([p[0] for p in pairs])
    labels = np.array([p[1] for p in pairs])
    # keep, per cluster, only items of its first class
    keep = np.array([labels[i] == labels[np.flatnonzero(assign == assign[i])[0]] for i in range(len(pairs))])
    assert purity(assign, labels, include=keep) == 1.0


def make_result(status, labels=None):
    n = len(status)
    labels = np.zeros(n, np.int64) if labels is None else np.asarray(labels)
    trimmed = np.array([s == "t" for s in status])
    clusters = tuple(np.unique(labels[~trimmed]).tolist())
    cores = tuple(frozenset(i for i in range(n) if status[i] == "c" and labels[i] == c) for c in clusters)
    weak = frozenset(i for i in range(n) if status[i] == "w")
    return CoreClusteringResult(Assignment(labels, trimmed), clusters, cores, weak,
                                frozenset(np.flatnonzero(trimmed).tolist()), 0.1)


def test_agreement_extremes():
    r = make_result("cccwwct")
    assert agreement(r, r).row() == [3 + 1, 0, 0, 2]


def test_agreement_all_core_vs_all_weak():
    n = 8
    a = make_result("c" * n)
    # all-weak results have empty cores; build directly
    b = CoreClusteringResult(Assignment(np.zeros(n, np.int64)), (0,), (frozenset(),),
                             frozenset(range(n)), frozenset(), 0.1)
    m = agreement(a, b)
    assert (m.a, m.b, m.c, m.d) == (0, n, 0, 0)
    assert m.discordant_fraction == 1.0


def test_agreement_excludes_trimmed_in_either():
    r1 = make_result("ccwtw")
    r2 = make_result("twccw")
    m = agreement(r1, r2)
    assert m.total == 3
    assert m.row() == [0, 1, 1, 1]


@settings(max_examples=100)
@given(st.text(alphabet="cwt", min_size=1, max_size=40), st.randoms())
def test_agreement_transpose_symmetry(s1, rnd):
    s2 = "".join(rnd.choice("cwt") for _ in s1)
    m = agreement(make_result(s1), make_result(s2))
    t = agreement(make_result(s2), make_result(s1))
    assert (m.a, m.d) == (t.a, t.d) and (m.b, m.c) == (t.c, t.b)


def test_agreement_mismatch():
    with pytest.raises(ValueError):
        agreement(make_result("cc"), make_result("ccc"))


def test_report_without_weak_points():
    labels = np.array([0, 0, 1, 1, 1])
    r = make_result("ccccc", labels)
    rep = report(r, ["a", "a", "b", "b", "a"])
    assert rep.weak_fraction == 0.0
    assert rep.purity_core == rep.purity_original == pytest.approx(0.8)


def test_report_uses_result_labels(synthetic150):
    r = core_clustering(synthetic150, CoreConfig(iterations=50, seed=2))
    rep = report(r)
    assert rep.purity_original == purity(r.original.labels, synthetic150.labels)
    core = sorted(r.core_ids)
    assert rep.purity_core == purity(r.original.labels[core], synthetic150.labels[core])
    with pytest.raises(ValueError):
        report(make_result("cc"))


def test_csv_rows():
    labels = np.array([0, 0, 1, 1, 1])
    rep = report(make_result("cccwc", labels), ["a", "a", "b", "b", "a"])
    text = format_csv(REPORT_HEADER, [rep.row("toy", "kmeanspp")])
    assert text.splitlines() == ["dataset,algorithm,P_o,P_c,w", "toy,kmeanspp,0.800000,0.750000,0.200000"]
    assert format_csv(AGREEMENT_HEADER, [[1, 2, 3, 4]]) == "a,b,c,d\n1,2,3,4\n"
