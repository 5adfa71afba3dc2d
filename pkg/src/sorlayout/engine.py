"""Relaxation engine: SOR sweeps with random per-sweep pivot assignment.

Each sweep visits the enabled constraints in priority order (highest
first), picks a fresh random pivot variable per constraint, skips
inequalities that are already satisfied, and otherwise moves the pivot
toward the value that satisfies the constraint, scaled by the relaxation
parameter omega. Iteration stops once the largest per-variable relative
change of a sweep falls below the configured tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

from . import backends
from .rng import SplitMix64
from .system import (
    COEFF_EPS,
    Constraint,
    ConstraintSystem,
    Relation,
    Solution,
)

# Guards relative-change denominators for variables near zero.
ERR_EPS = 1e-6

_REL_CODE = {Relation.EQ: 0, Relation.LE: 1, Relation.GE: 2}


class LengthMismatchError(ValueError):
    """Solutions of different lengths were compared."""


class NoEligiblePivotError(ValueError):
    """A constraint offers no variable usable as pivot (corrupted input)."""


@dataclass
class SolverConfig:
    """Relaxation parameter, stopping rule, and pivot RNG seed."""

    omega: float = 0.7
    tolerance: float = 0.01
    max_iterations: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.omega < 2.0:
            raise ValueError("omega must lie strictly between 0 and 2")
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


@dataclass
class SolveResult:
    solution: Solution
    converged: bool
    iterations: int
    final_error: float


class CompiledSystem:
    """Flat array view of a ConstraintSystem consumed by the kernels."""

    __slots__ = (
        "m",
        "n",
        "row_ptr",
        "cols",
        "coefs",
        "rel",
        "rhs",
        "ids",
        "row_of",
        "priority_rows",
        "row_nterms",
    )

    def __init__(self, system: ConstraintSystem):
        constraints = system.constraints
        self.m = len(constraints)
        self.n = system.variable_count
        row_ptr = np.zeros(self.m + 1, dtype=np.int32)
        cols: list[int] = []
        coefs: list[float] = []
        rel = np.zeros(self.m, dtype=np.int8)
        rhs = np.zeros(self.m, dtype=np.float64)
        ids = np.zeros(self.m, dtype=np.int64)
        self.row_of: dict[int, int] = {}
        for row, c in enumerate(constraints):
            if not c.terms:
                raise NoEligiblePivotError(f"constraint {c.id} has no terms")
            for var, coef in c.terms:
                cols.append(var)
                coefs.append(coef)
            row_ptr[row + 1] = len(cols)
            rel[row] = _REL_CODE[c.relation]
            rhs[row] = c.rhs
            ids[row] = c.id
            self.row_of[c.id] = row
        self.row_ptr = row_ptr
        self.cols = np.asarray(cols, dtype=np.int32)
        self.coefs = np.asarray(coefs, dtype=np.float64)
        self.rel = rel
        self.rhs = rhs
        self.ids = ids
        self.row_nterms = np.diff(row_ptr)
        # All rows ordered highest priority first; priorities are unique.
        priorities = np.asarray([c.priority for c in constraints], dtype=np.int64)
        self.priority_rows = np.argsort(priorities, kind="stable").astype(np.int32)

    def rows_for(self, enabled: Iterable[int] | None) -> np.ndarray:
        """Row visit order (highest priority first) for an enabled id set."""
        if enabled is None:
            return self.priority_rows
        enabled_set = set(enabled)
        unknown = enabled_set.difference(self.row_of)
        if unknown:
            raise KeyError(f"unknown constraint ids: {sorted(unknown)}")
        keep = [row for row in self.priority_rows if int(self.ids[row]) in enabled_set]
        return np.asarray(keep, dtype=np.int32)

    def pivot_slots_for(self, pivots: Mapping[int, int] | None) -> np.ndarray:
        """Per-row fixed pivot slot indices; -1 requests a random pivot."""
        slots = np.full(self.m, -1, dtype=np.int32)
        if pivots:
            for cid, var in pivots.items():
                row = self.row_of[cid]
                start, end = int(self.row_ptr[row]), int(self.row_ptr[row + 1])
                for t in range(start, end):
                    if int(self.cols[t]) == var:
                        slots[row] = t - start
                        break
                else:
                    raise NoEligiblePivotError(
                        f"variable {var} not eligible as pivot of constraint {cid}"
                    )
        return slots


def run_compiled(
    compiled: CompiledSystem,
    order: np.ndarray,
    x: np.ndarray,
    config: SolverConfig,
    rng: SplitMix64,
    *,
    pivot_slots: np.ndarray | None = None,
    max_sweeps: int | None = None,
    err_trace: np.ndarray | None = None,
    kernel=None,
) -> tuple[int, float, bool]:
    """Run sweeps on a compiled system, mutating ``x`` and ``rng`` in place."""
    if kernel is None:
        kernel = backends.get_kernel()
    if pivot_slots is None:
        pivot_slots = np.full(compiled.m, -1, dtype=np.int32)
    if max_sweeps is None:
        max_sweeps = config.max_iterations
    if err_trace is None:
        err_trace = np.empty(max_sweeps, dtype=np.float64)
    prev = np.empty_like(x)
    sweeps, final_error, converged, rng.state = kernel.run_sweeps(
        compiled.row_ptr,
        compiled.cols,
        compiled.coefs,
        compiled.rel,
        compiled.rhs,
        order,
        pivot_slots,
        x,
        prev,
        config.omega,
        config.tolerance,
        ERR_EPS,
        max_sweeps,
        rng.state,
        err_trace,
    )
    return sweeps, final_error, bool(converged)


def assign_pivots_random(
    system: ConstraintSystem,
    enabled: Iterable[int],
    rng: SplitMix64,
) -> dict[int, int]:
    """Pick a pivot variable uniformly at random for each enabled constraint.

    Constraints are processed highest priority first so the consumed RNG
    stream matches one solver sweep exactly.
    """
    chosen = [system.constraint(cid) for cid in enabled]
    chosen.sort(key=lambda c: c.priority)
    mapping: dict[int, int] = {}
    for c in chosen:
        if not c.terms:
            raise NoEligiblePivotError(f"constraint {c.id} has no terms")
        slot = rng.next_below(len(c.terms))
        mapping[c.id] = c.terms[slot][0]
    return mapping


def relax_step(
    constraint: Constraint,
    pivot: int,
    solution: Solution,
    omega: float,
) -> float:
    """New pivot value for one constraint, using current solution values.

    Computes omega * ((rhs - sum_others) / a_pivot) + (1 - omega) * x_pivot;
    at omega = 1 this is exactly the Gauss-Seidel update. The caller writes
    the value back, and for inequalities applies it only when violated.
    """
    ap = 0.0
    for var, coef in constraint.terms:
        if var == pivot:
            ap = coef
            break
    else:
        raise NoEligiblePivotError(
            f"variable {pivot} not a term of constraint {constraint.id}"
        )
    if abs(ap) <= COEFF_EPS:
        raise NoEligiblePivotError(
            f"variable {pivot} has a structurally zero coefficient"
        )
    values = solution.values
    acc = 0.0
    for var, coef in constraint.terms:
        if var != pivot:
            acc = acc + coef * float(values[var])
    xp = float(values[pivot])
    return omega * ((constraint.rhs - acc) / ap) + (1.0 - omega) * xp


def relative_error(prev: Solution, next_: Solution) -> float:
    """Max per-variable relative change, guarding near-zero denominators."""
    a = prev.values
    b = next_.values
    if a.shape[0] != b.shape[0]:
        raise LengthMismatchError(f"lengths differ: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(b - a) / np.maximum(np.abs(b), ERR_EPS)))


def iterate_once(
    system: ConstraintSystem,
    enabled: Iterable[int] | None,
    solution: Solution,
    config: SolverConfig,
    rng: SplitMix64,
    *,
    pivots: Mapping[int, int] | None = None,
    backend: str | None = None,
) -> float:
    """One full sweep over the enabled constraints, mutating ``solution``.

    Returns the relative approximate error between the pre- and post-sweep
    solutions.
    """
    compiled = CompiledSystem(system)
    order = compiled.rows_for(enabled)
    x = solution.values
    if x.shape[0] != compiled.n:
        raise LengthMismatchError(
            f"solution length {x.shape[0]} does not match system {compiled.n}"
        )
    _, error, _ = run_compiled(
        compiled,
        order,
        x,
        config,
        rng,
        pivot_slots=compiled.pivot_slots_for(pivots),
        max_sweeps=1,
        kernel=backends.get_kernel(backend),
    )
    return error


def solve(
    system: ConstraintSystem,
    enabled: Iterable[int] | None,
    start: Solution,
    config: SolverConfig,
    *,
    rng: SplitMix64 | None = None,
    pivots: Mapping[int, int] | None = None,
    on_sweep: Callable[[int, float], None] | None = None,
    backend: str | None = None,
) -> SolveResult:
    """Iterate sweeps until the relative error drops below tolerance.

    ``start`` is never mutated. Non-convergence within the iteration budget
    is a normal outcome reported via ``converged=False``. Passing ``rng``
    continues an existing pivot stream; otherwise a fresh stream is seeded
    from the config.
    """
    compiled = CompiledSystem(system)
    order = compiled.rows_for(enabled)
    x = start.values.copy()
    if x.shape[0] != compiled.n:
        raise LengthMismatchError(
            f"start length {x.shape[0]} does not match system {compiled.n}"
        )
    if x.shape[0] and not np.isfinite(x).all():
        raise ValueError("start solution must be finite")
    if rng is None:
        rng = SplitMix64(config.seed)
    err_trace = np.empty(config.max_iterations, dtype=np.float64)
    sweeps, final_error, converged = run_compiled(
        compiled,
        order,
        x,
        config,
        rng,
        pivot_slots=compiled.pivot_slots_for(pivots),
        err_trace=err_trace,
        kernel=backends.get_kernel(backend),
    )
    if on_sweep is not None:
        for i in range(sweeps):
            on_sweep(i, float(err_trace[i]))
    return SolveResult(
        solution=Solution(x),
        converged=converged,
        iterations=sweeps,
        final_error=final_error,
    )
