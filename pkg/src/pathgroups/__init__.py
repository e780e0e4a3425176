"""Detection of node groups with shared multi-order dynamics in pathway data.

The library infers a partition of nodes and a Bayesian multi-order Markov
model of group-to-group dynamics jointly, selecting both the partition and
the Markov order by analytic marginal likelihood.
"""

from .corpus import GraphConstraint, Partition, PathCorpus
from .counting import CountLayer, LayeredCounts, aggregate_counts, build_counts, project_to_order
from .dynamics import (
    BF_VERY_STRONG,
    MonPosterior,
    OrderSelectionResult,
    SuccessorSet,
    mon_log_marginal,
    mon_posterior,
    select_order,
)
from .emission import EmissionPosterior, emission_log_marginal, emission_posterior
from .evaluate import ami, compare_fixed_orders, optimize_from_labels, order_scan_fixed_labels
from .kernels import HAVE_COMPILED, backend_name, get_backend
from .model import (
    HogModel,
    PartitionScorer,
    ScoredPartition,
    fit_hog,
    hog_path_log_likelihood,
    score_partition,
)
from .search import (
    MhConfig,
    SearchTrace,
    exhaustive_search,
    incremental_rescore,
    mh_search,
    partition_count,
    restricted_growth_strings,
)
from .synthetic import (
    GroundTruth,
    assemble_truth,
    make_community_dynamics,
    make_random_mon,
    make_role_dynamics,
    sample_group_paths,
    sample_paths,
    truth_to_model,
)

__version__ = "0.1.0"

__all__ = [
    "GraphConstraint",
    "Partition",
    "PathCorpus",
    "CountLayer",
    "LayeredCounts",
    "aggregate_counts",
    "build_counts",
    "project_to_order",
    "BF_VERY_STRONG",
    "MonPosterior",
    "OrderSelectionResult",
    "SuccessorSet",
    "mon_log_marginal",
    "mon_posterior",
    "select_order",
    "EmissionPosterior",
    "emission_log_marginal",
    "emission_posterior",
    "ami",
    "compare_fixed_orders",
    "optimize_from_labels",
    "order_scan_fixed_labels",
    "HAVE_COMPILED",
    "backend_name",
    "get_backend",
    "HogModel",
    "PartitionScorer",
    "ScoredPartition",
    "fit_hog",
    "hog_path_log_likelihood",
    "score_partition",
    "MhConfig",
    "SearchTrace",
    "exhaustive_search",
    "incremental_rescore",
    "mh_search",
    "partition_count",
    "restricted_growth_strings",
    "GroundTruth",
    "assemble_truth",
    "make_community_dynamics",
    "make_random_mon",
    "make_role_dynamics",
    "sample_group_paths",
    "sample_paths",
    "truth_to_model",
]
