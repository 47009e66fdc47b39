"""Core clusters: the members of each cluster that stay together across re-clusterings.

A core cluster is the largest subset of an original cluster in which every
pair of items shares a cluster with probability at least ``1 - alpha`` when
the data are resampled and re-clustered. Items of a cluster outside its core
are weak points.
"""
__version__ = "0.1.0"

from .dataset import (
    Dataset,
    DataError,
    GaussianMixtureSpec,
    bootstrap_indices,
    generate_gaussian_mixture,
    load_bcw,
    load_csv,
    load_iris,
    save_csv,
    substream,
    triangle_mixture,
)
from .clustering import (
    Assignment,
    AssignmentUndefined,
    ClusterConfig,
    ClusteringError,
    FittedClustering,
    assign_point,
    hierarchical_fit,
    kmeans_fit,
    kmeanspp_init,
    nearest_centroid_fit,
    trimmed_kmeans_fit,
)
from .cooccurrence import (
    CoocCounters,
    CoocEstimate,
    bootstrap_sigma,
    cooc_bootstrap,
    cooc_direct,
    merge_counters,
    pair_coverage,
    required_samples,
)
from .clique import CoocGraph, brute_force_max_clique, build_threshold_graph, largest_maximal_clique
from .corecluster import CoreClusteringResult, CoreConfig, core_clustering, weak_fraction
from .evaluation import AgreementMatrix, PurityReport, agreement, purity, report
