"""PageRank on the backtrack-weighted directed-edge lift of an undirected graph."""

__version__ = "0.1.0"

from .graph import Graph, GraphError, build_graph
from .generators import GenerationError, GeneratorSpec, generate, generate_connected
from .lift import HEAD_COPY, TAIL_DEGREE, EdgeLift, apply_transition, build_lift, lift_distribution, project_to_nodes
from .solvers import (
    INF,
    ConvergenceWarning,
    PageRankConfig,
    PageRankVector,
    biregular_closed_form,
    edge_pagerank,
    infinity_pagerank,
    mu_pagerank,
    nb_pagerank,
    standard_pagerank,
)
from .experiments import equivalence_gaps, monte_carlo_walk, mu_sweep, overlap_experiment, top_k, topk_overlap
from .clustering import best_match_accuracy, cluster, nmi, personalized_basis, pr_distance
from .formats import ParseError, parse_edge_list, parse_gml, read_graph

__all__ = [
    name for name, obj in list(globals().items())
    if not name.startswith("_") and getattr(obj, "__module__", "").startswith("nbpagerank")
] + ["INF", "HEAD_COPY", "TAIL_DEGREE"]
