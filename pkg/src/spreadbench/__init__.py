"""spreadbench: centrality metrics benchmarked against SIR spreading influence."""

from .centrality import METRICS, CentralityScores, compute_all
from .epidemic import (InfluenceCurve, InfluenceResult, SimulationConfig,
                       config_from_lambda_ratio, exact_influence_small,
                       influence_curves, simulate_run)
from .evaluation import (EvaluationCell, aggregate_datasets, evaluate_metrics,
                         pearson, precision_at, relative_gain)
from .graphs import (Graph, GraphStats, ParseOptions, connected_components,
                     degree_stats, epidemic_threshold, graph_from_edges,
                     load_edge_list, load_graph, threshold_from_moments,
                     write_edge_list)
from .pipeline import ExperimentSpec, run_experiment

__version__ = "0.1.0"

__all__ = [
    "METRICS", "CentralityScores", "compute_all",
    "InfluenceCurve", "InfluenceResult", "SimulationConfig",
    "config_from_lambda_ratio", "exact_influence_small", "influence_curves",
    "simulate_run",
    "EvaluationCell", "aggregate_datasets", "evaluate_metrics", "pearson",
    "precision_at", "relative_gain",
    "Graph", "GraphStats", "ParseOptions", "connected_components",
    "degree_stats", "epidemic_threshold", "graph_from_edges", "load_edge_list",
    "load_graph", "threshold_from_moments", "write_edge_list",
    "ExperimentSpec", "run_experiment",
    "__version__",
]
