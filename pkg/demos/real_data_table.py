"""
Purity before and after core clustering
=======================================

Iris and the Wisconsin breast cancer data with three clustering functions.
Cores should be at least as pure as the clusters they come from; the
share of weak points says how unstable each algorithm is on the data.
"""
from coreclust import ClusterConfig, CoreConfig, core_clustering, load_bcw, load_iris, report
from coreclust.evaluation import REPORT_HEADER, format_csv

rows = []
for name, data, k in (("iris", load_iris(), 3), ("bcw", load_bcw(), 2)):
    for method in ("kmeanspp", "hierarchical", "trimmed_kmeans"):
        cfg = CoreConfig(alpha=0.1, iterations=300, cluster_config=ClusterConfig(method, k=k), seed=0)
        rows.append(report(core_clustering(data, cfg)).row(name, method))

print(format_csv(REPORT_HEADER, rows))
