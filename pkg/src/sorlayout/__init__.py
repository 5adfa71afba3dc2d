"""Soft-constraint layout solving with successive over-relaxation."""

from .backends import available_backends, default_backend_name, get_kernel
from .bench import (
    BenchmarkRecord,
    RegressionFit,
    SingularDesignError,
    fit_cubic,
    fit_groups,
    read_csv,
    run_experiment,
    write_csv,
)
from .engine import (
    ERR_EPS,
    LengthMismatchError,
    NoEligiblePivotError,
    SolveResult,
    SolverConfig,
    assign_pivots_random,
    iterate_once,
    relative_error,
    relax_step,
    solve,
)
from .layout import (
    MIN_WINDOW,
    Area,
    BelowMinimumError,
    LayoutSpec,
    big_step,
    generate_layout,
    layout_from_dict,
    layout_to_dict,
    perturb_constraints,
    resize,
    small_step,
)
from .resolver import ResolvedSolve, solve_with_insertion
from .rng import SplitMix64, derive_seed
from .system import (
    COEFF_EPS,
    Constraint,
    ConstraintSystem,
    DuplicatePriorityError,
    EmptyConstraintError,
    Relation,
    Solution,
    UnknownConstraintError,
    is_satisfied,
    residual,
)

__version__ = "0.1.0"

__all__ = [
    "Area",
    "BenchmarkRecord",
    "BelowMinimumError",
    "COEFF_EPS",
    "Constraint",
    "ConstraintSystem",
    "DuplicatePriorityError",
    "ERR_EPS",
    "EmptyConstraintError",
    "LayoutSpec",
    "LengthMismatchError",
    "MIN_WINDOW",
    "NoEligiblePivotError",
    "RegressionFit",
    "Relation",
    "ResolvedSolve",
    "SingularDesignError",
    "Solution",
    "SolveResult",
    "SolverConfig",
    "SplitMix64",
    "UnknownConstraintError",
    "assign_pivots_random",
    "available_backends",
    "big_step",
    "default_backend_name",
    "derive_seed",
    "fit_cubic",
    "fit_groups",
    "generate_layout",
    "get_kernel",
    "is_satisfied",
    "iterate_once",
    "layout_from_dict",
    "layout_to_dict",
    "perturb_constraints",
    "read_csv",
    "relative_error",
    "relax_step",
    "residual",
    "resize",
    "run_experiment",
    "small_step",
    "solve",
    "solve_with_insertion",
    "write_csv",
]
