"""Exact earthmover distances on weighted trees and l1 embeddings of Wasserstein spaces."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .measure import DiscreteMeasure, dirac, make_measure, pushforward
from .oracle import FiniteMetric, euclidean_metric, kr_dual_value, make_metric, pairwise_distances, transport_lp
from .stochastic import (
    Component,
    DistortionReport,
    StochasticTreeEmbedding,
    frt_sample,
    identity_embedding,
    lift_measure,
    random_measure,
    random_measure_pairs,
    validate_embedding,
    wasserstein_distortion_audit,
    wasserstein_l1_map,
)
from .tree import Edge, MetricTree, build_tree, path_distance, subtree_of, tree_from_parents
from .tree_ot import (
    Coupling,
    EmbeddingVector,
    coupling_cost,
    embed_measure,
    l1_distance,
    optimal_coupling,
    subtree_masses,
    tree_wasserstein,
)
