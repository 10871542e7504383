"""Curvature-adapted evolution strategy for black-box minimization.

The optimizer samples mirrored offspring along random orthogonal
directions, estimates the objective's curvature along each direction by
finite differences, and multiplies the square root of its search
covariance by a corresponding update factor each generation; step sizes
follow cumulative step-size adaptation tuned for mirrored sampling.  A
benchmark harness with a CLI reproduces standard quadratic and
non-convex test-function experiments.
"""
from .core import (
    GenerationRecord,
    HeesOptimizer,
    OptimizerState,
    RunResult,
    TERMINATION_REASONS,
    condition_number,
    default_pair_count,
    rank_and_weight,
)
from .curvature import (
    EvaluationError,
    apply_update,
    compute_G,
    estimate_curvatures,
)
from .estimator import HEES
from .harness import (
    EcdfCurve,
    ExperimentArchive,
    ExperimentConfig,
    compute_ecdf,
    default_budget_grid,
    median_trajectory,
    run_experiment,
)
from .objectives import (
    ObjectiveProblem,
    cigar,
    discus,
    ellipsoid,
    log_sphere,
    make_problem,
    make_quadratic,
    make_rastrigin,
    make_rosenbrock,
    problem_names,
    rugged_sphere,
    rugged_transform,
    sphere,
)
from .sampling import (
    DirectionSet,
    random_rotation,
    sample_direction_blocks,
    sample_orthogonal,
)
from .stepsize import (
    CsaState,
    RecombinationWeights,
    chi_d,
    mu_eff,
    mu_eff_mirrored,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # core
    "HeesOptimizer",
    "OptimizerState",
    "GenerationRecord",
    "RunResult",
    "TERMINATION_REASONS",
    "condition_number",
    "default_pair_count",
    "rank_and_weight",
    # curvature
    "EvaluationError",
    "estimate_curvatures",
    "compute_G",
    "apply_update",
    # estimator
    "HEES",
    # harness
    "ExperimentConfig",
    "ExperimentArchive",
    "EcdfCurve",
    "run_experiment",
    "compute_ecdf",
    "median_trajectory",
    "default_budget_grid",
    # objectives
    "ObjectiveProblem",
    "make_quadratic",
    "sphere",
    "ellipsoid",
    "discus",
    "cigar",
    "make_rosenbrock",
    "make_rastrigin",
    "log_sphere",
    "rugged_sphere",
    "rugged_transform",
    "make_problem",
    "problem_names",
    # sampling
    "DirectionSet",
    "sample_orthogonal",
    "sample_direction_blocks",
    "random_rotation",
    # step size
    "RecombinationWeights",
    "CsaState",
    "chi_d",
    "mu_eff",
    "mu_eff_mirrored",
]
