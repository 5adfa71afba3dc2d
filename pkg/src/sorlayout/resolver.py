"""Conflict resolution by constraint insertion.

Constraints are enabled one at a time in descending priority. After each
tentative enable the system is re-solved from the current working
solution; if the solve stabilizes and every enabled constraint is
satisfied the constraint stays, otherwise it is disabled and the working
solution is restored bit-exactly. The initial working solution is the
caller's start vector, which is where warm starting enters.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import backends
from .engine import CompiledSystem, SolverConfig, run_compiled
from .rng import SplitMix64
from .system import ConstraintSystem, Solution


@dataclass
class AttemptRecord:
    """State needed to replay one insertion attempt exactly."""

    constraint_id: int
    accepted: bool
    converged: bool
    sweeps: int
    rng_state_before: int
    enabled_before: tuple[int, ...]
    start_values: np.ndarray


def _run_attempt(
    compiled, order, work, config, rng, kernel, pivot_slots, err_trace, forced_pivots
):
    """Spend up to config.max_iterations sweeps trying to satisfy ``order``.

    A solve that stabilizes while some enabled constraint is still violated
    has not used up the attempt's budget: sweeping resumes from the stable
    point with freshly randomized pivots until the constraints hold or the
    budget is exhausted. Returns (accepted, converged, sweeps_used).

    When every enabled row has a single term (``forced_pivots``), pivot
    choice cannot vary, so the sweep dynamics are deterministic: revisiting
    a bit-identical state proves the remaining budget would only repeat
    itself, and the attempt is rejected early with an unchanged outcome.
    """
    remaining = config.max_iterations
    converged = False
    used = 0
    seen_states: set[bytes] = {work.tobytes()} if forced_pivots else set()
    while True:
        sweeps, _, converged = run_compiled(
            compiled,
            order,
            work,
            config,
            rng,
            pivot_slots=pivot_slots,
            max_sweeps=remaining,
            err_trace=err_trace,
            kernel=kernel,
        )
        used += sweeps
        remaining -= sweeps
        if converged:
            violated = kernel.check_satisfied(
                compiled.row_ptr,
                compiled.cols,
                compiled.coefs,
                compiled.rel,
                compiled.rhs,
                order,
                work,
                config.tolerance,
            )
            if violated < 0:
                return True, converged, used
        if remaining <= 0:
            return False, converged, used
        if forced_pivots and converged:
            state = work.tobytes()
            if state in seen_states:
                return False, converged, used
            seen_states.add(state)


@dataclass
class ResolvedSolve:
    solution: Solution
    enabled: list[int]
    disabled: list[int]
    total_sweeps: int
    wall_time_ns: int
    attempt_count: int = 0
    converged_attempts: int = 0
    attempts: list[AttemptRecord] = field(default_factory=list)

    @property
    def converged_fraction(self) -> float:
        if self.attempt_count == 0:
            return 1.0
        return self.converged_attempts / self.attempt_count


def solve_with_insertion(
    system: ConstraintSystem,
    start: Solution,
    config: SolverConfig,
    *,
    backend: str | None = None,
    record_attempts: bool = False,
) -> ResolvedSolve:
    """Resolve a possibly conflicting system into a satisfied enabled set.

    ``start`` is not mutated. Each attempt gets the full per-solve iteration
    budget from ``config``; one RNG seeded from the config serves all
    attempts in sequence so identical inputs replay identically.
    """
    t0 = time.perf_counter_ns()
    kernel = backends.get_kernel(backend)
    compiled = CompiledSystem(system)
    x = start.values.copy()
    if x.shape[0] != compiled.n:
        raise ValueError(
            f"start length {x.shape[0]} does not match system {compiled.n}"
        )
    if x.shape[0] and not np.isfinite(x).all():
        raise ValueError("start solution must be finite")

    rng = SplitMix64(config.seed)
    pivot_slots = np.full(compiled.m, -1, dtype=np.int32)
    err_trace = np.empty(config.max_iterations, dtype=np.float64)
    enabled_rows = np.empty(compiled.m, dtype=np.int32)
    n_enabled = 0
    work = np.empty_like(x)

    enabled_ids: list[int] = []
    disabled_ids: list[int] = []
    attempts: list[AttemptRecord] = []
    total_sweeps = 0
    converged_attempts = 0
    enabled_all_single = True

    for row in compiled.priority_rows:
        cid = int(compiled.ids[row])
        enabled_rows[n_enabled] = row
        order = enabled_rows[: n_enabled + 1]
        rng_state_before = rng.state
        np.copyto(work, x)
        attempt_forced = enabled_all_single and int(compiled.row_nterms[row]) == 1
        ok, converged, sweeps = _run_attempt(
            compiled, order, work, config, rng, kernel, pivot_slots, err_trace,
            attempt_forced,
        )
        total_sweeps += sweeps
        converged_attempts += int(converged)
        if record_attempts:
            attempts.append(
                AttemptRecord(
                    constraint_id=cid,
                    accepted=ok,
                    converged=converged,
                    sweeps=sweeps,
                    rng_state_before=rng_state_before,
                    enabled_before=tuple(enabled_ids),
                    start_values=x.copy(),
                )
            )
        if ok:
            np.copyto(x, work)
            n_enabled += 1
            enabled_ids.append(cid)
            enabled_all_single = attempt_forced
        else:
            # Rejected: the working solution is left untouched, which is the
            # exact pre-attempt state.
            disabled_ids.append(cid)

    return ResolvedSolve(
        solution=Solution(x),
        enabled=enabled_ids,
        disabled=disabled_ids,
        total_sweeps=total_sweeps,
        wall_time_ns=time.perf_counter_ns() - t0,
        attempt_count=compiled.m,
        converged_attempts=converged_attempts,
        attempts=attempts,
    )
