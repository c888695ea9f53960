"""Exact continuous Frechet distance for polygonal curves with 32-bit
integer coordinates, computed through bottleneck paths in a vertex-event
graph with on-demand monotonicity-event refinement and lossless curve
simplification."""

from .exact_numbers import (
    EQUAL,
    GREATER,
    LESS,
    ExactRoot,
    InvalidRadicandError,
    compare_fraction_to_root,
    compare_root_expressions,
    rational_lower_bound,
    rational_upper_bound,
)
from .geometry import (
    Curve,
    equidistant_parameter,
    free_interval_on_segment,
    nearest_parameter_on_segment,
    squared_distance,
)
from .oracles import brute_force_exact, decide, discrete_frechet
from .refinement import (
    RefinementBoundError,
    compute_exact_frechet,
    refine_column,
    refine_step,
    run_refinement,
)
from .simplification import (
    SimplificationState,
    greedy_joint_traversal,
    initial_simplification,
    lossless_compute,
    weighted_lower_bound,
)
from .ve_graph import (
    VEGraph,
    VEPath,
    build_graph,
    interpolated_ve_distance,
    min_cost_path_dijkstra,
    min_cost_path_sweepline,
    monotonicity_report,
)

__all__ = [
    "EQUAL",
    "GREATER",
    "LESS",
    "Curve",
    "ExactRoot",
    "InvalidRadicandError",
    "RefinementBoundError",
    "SimplificationState",
    "VEGraph",
    "VEPath",
    "brute_force_exact",
    "build_graph",
    "compare_fraction_to_root",
    "compare_root_expressions",
    "compute_exact_frechet",
    "decide",
    "discrete_frechet",
    "equidistant_parameter",
    "free_interval_on_segment",
    "greedy_joint_traversal",
    "initial_simplification",
    "interpolated_ve_distance",
    "lossless_compute",
    "min_cost_path_dijkstra",
    "min_cost_path_sweepline",
    "monotonicity_report",
    "nearest_parameter_on_segment",
    "rational_lower_bound",
    "rational_upper_bound",
    "refine_column",
    "refine_step",
    "run_refinement",
    "squared_distance",
    "weighted_lower_bound",
]

__version__ = "0.1.0"
