"""combrange: the range of a random walk on the two-dimensional comb.

Monte Carlo simulation, exact small-instance oracles, closed-form 1-D
walk utilities, and scaling analysis for the expected number of distinct
sites visited.
"""

from .comb import Axis, Site, StepKind, degree, neighbors, step
from .errors import CapacityError, SizeLimitError
from .estimator import (
    Diagnostics,
    Estimate,
    ExperimentConfig,
    estimate_range_1d,
    estimate_ruin_frequency,
    estimate_u_j,
    replicate_seed,
    run_experiment,
    run_summaries,
)
from .rng import RandomSource
from .simulator import (
    SiteClass,
    StopKind,
    StopRule,
    VisitedRange,
    WalkStats,
    classify_site,
    dump_trajectory,
    run_walk,
    run_walk_reference,
    run_walk_with_target,
    visited_count,
)

__version__ = "0.1.0"

__all__ = [
    "Axis", "Site", "StepKind", "degree", "neighbors", "step",
    "CapacityError", "SizeLimitError",
    "Diagnostics", "Estimate", "ExperimentConfig",
    "estimate_range_1d", "estimate_ruin_frequency", "estimate_u_j",
    "replicate_seed", "run_experiment", "run_summaries",
    "RandomSource",
    "SiteClass", "StopKind", "StopRule", "VisitedRange", "WalkStats",
    "classify_site", "dump_trajectory", "run_walk", "run_walk_reference",
    "run_walk_with_target", "visited_count",
    "__version__",
]
