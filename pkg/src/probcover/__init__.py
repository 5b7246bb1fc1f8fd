"""Subset selection for low-budget active learning by maximum probability coverage."""

from probcover.covergraph import CoverGraph, build_graph, coverage, mark_covered, max_outdegree_vertex
from probcover.data import (
    Component, EmbeddingSet, MixtureSpec, generate_mixture, load_embeddings, normalize_l2,
    save_embeddings,
)
from probcover.delta_estimation import KMeansResult, PurityCurve, estimate_delta, kmeans, purity
from probcover.errors import (
    CapacityError, EmbeddingFormatError, OracleLimitError, ProbCoverError, ValidationError,
)
from probcover.evaluation import EvalReport, compute_bound, evaluate, knn_accuracy
from probcover.oracle import OracleBudgetLimit, optimal_coverage, optimal_kcenter
from probcover.selection import (
    LabeledPool, Selection, coreset_radius, select_coreset, select_probcover,
    select_probcover_pairs, select_random,
)

__version__ = "0.1.0"
