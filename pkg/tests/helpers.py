"""Shared oracles and generators for the test suite.

The oracles here are deliberately independent of the solver code paths
they check: dense elimination comes from numpy, feasibility of small
mixed systems from scipy's LP solver.
"""

from __future__ import annotations

import random

import numpy as np

from sorlayout import (
    Constraint,
    ConstraintSystem,
    Relation,
    Solution,
    SolverConfig,
    SplitMix64,
    is_satisfied,
    solve,
)
from sorlayout.resolver import solve_with_insertion


def dd_system(
    rng: random.Random, n: int, density: float = 0.4
) -> tuple[ConstraintSystem, dict[int, int], np.ndarray, np.ndarray]:
    """Random strictly diagonally dominant square EQ system.

    Returns (system, diagonal pivot assignment, dense A, b) so tests can
    run an elimination oracle on the same data.
    """
    a = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < density:
                a[i, j] = rng.uniform(-1.0, 1.0)
        off = np.sum(np.abs(a[i])) - abs(a[i, i])
        a[i, i] = (off + rng.uniform(1.0, 3.0)) * (1 if rng.random() < 0.5 else -1)
    b = np.array([rng.uniform(-10.0, 10.0) for _ in range(n)])
    system = ConstraintSystem(n)
    pivots: dict[int, int] = {}
    for i in range(n):
        terms = [(j, a[i, j]) for j in range(n) if a[i, j] != 0.0]
        cid = system.add_constraint(terms, Relation.EQ, b[i], priority=i + 1)
        pivots[cid] = i
    return system, pivots, a, b


def random_small_system(
    rng: random.Random, max_vars: int = 3, max_cons: int = 6
) -> ConstraintSystem:
    """Random prioritized mixed EQ/LE/GE system with continuous coefficients."""
    n = rng.randint(1, max_vars)
    m = rng.randint(2, max_cons)
    system = ConstraintSystem(n)
    priorities = list(range(1, m + 1))
    rng.shuffle(priorities)
    for i in range(m):
        n_terms = rng.randint(1, n)
        vars_ = rng.sample(range(n), n_terms)
        terms = []
        for var in vars_:
            coef = rng.uniform(0.1, 2.0) * (1 if rng.random() < 0.5 else -1)
            terms.append((var, coef))
        relation = rng.choice([Relation.EQ, Relation.LE, Relation.GE])
        rhs = rng.uniform(-5.0, 5.0)
        system.add_constraint(terms, relation, rhs, priorities[i])
    return system


def gui_like_system(
    rng: random.Random, max_vars: int = 3, max_cons: int = 6
) -> ConstraintSystem:
    """Random system with the texture of layout constraints.

    Rows are position pins and pairwise offsets with unit coefficients,
    the shape on which every pivot choice keeps relaxation contractive.
    """
    n = rng.randint(1, max_vars)
    m = rng.randint(2, max_cons)
    system = ConstraintSystem(n)
    priorities = list(range(1, m + 1))
    rng.shuffle(priorities)
    for i in range(m):
        k = rng.randint(1, min(2, n))
        vars_ = rng.sample(range(n), k)
        terms = [(var, float(rng.choice((-1, 1)))) for var in vars_]
        relation = rng.choice([Relation.EQ, Relation.LE, Relation.GE])
        rhs = float(rng.randint(-200, 200))
        system.add_constraint(terms, relation, rhs, priorities[i])
    return system


def lp_feasible(constraints: list[Constraint], n_vars: int, tol: float) -> bool:
    """LP feasibility of a constraint subset within the scaled tolerance."""
    from scipy.optimize import linprog

    rows = []
    bounds_ub = []
    for c in constraints:
        a = np.zeros(n_vars)
        for var, coef in c.terms:
            a[var] = coef
        slack = tol * max(1.0, abs(c.rhs))
        if c.relation in (Relation.EQ, Relation.LE):
            rows.append(a)
            bounds_ub.append(c.rhs + slack)
        if c.relation in (Relation.EQ, Relation.GE):
            rows.append(-a)
            bounds_ub.append(-(c.rhs - slack))
    if not rows:
        return True
    res = linprog(
        c=np.zeros(n_vars),
        A_ub=np.vstack(rows),
        b_ub=np.asarray(bounds_ub),
        bounds=[(None, None)] * n_vars,
        method="highs",
    )
    if res.status == 0:
        return True
    if res.status == 2:
        return False
    raise RuntimeError(f"linprog returned unexpected status {res.status}")


def greedy_feasible_oracle(system: ConstraintSystem, tol: float) -> list[int]:
    """Brute-force greedy maximal feasible set in descending priority order."""
    ordered = sorted(system.constraints, key=lambda c: c.priority)
    enabled: list[Constraint] = []
    for c in ordered:
        if lp_feasible(enabled + [c], system.variable_count, tol):
            enabled.append(c)
    return [c.id for c in enabled]


def attempt_via_public_solve(
    system: ConstraintSystem,
    enabled: list[int],
    start_values: np.ndarray,
    config: SolverConfig,
    rng_state: int,
) -> bool:
    """Replay one insertion attempt using only the public solve operation.

    Mirrors the resolver's budget semantics: keep solving from the point
    where the previous solve stabilized until the enabled set is satisfied
    or the per-attempt sweep budget is exhausted.
    """
    from dataclasses import replace

    rng = SplitMix64(0)
    rng.state = rng_state
    current = Solution(start_values.copy())
    remaining = config.max_iterations
    while True:
        result = solve(
            system,
            enabled,
            current,
            replace(config, max_iterations=remaining),
            rng=rng,
        )
        remaining -= result.iterations
        current = result.solution
        if result.converged and all(
            is_satisfied(system.constraint(cid), current, config.tolerance)
            for cid in enabled
        ):
            return True
        if remaining <= 0:
            return False


def replay_disabled_attempts(
    system: ConstraintSystem, start: Solution, config: SolverConfig
) -> int:
    """Re-run every rejected insertion attempt through the public solve path.

    Asserts that enabling the rejected constraint together with all
    higher-priority enabled constraints still finds no accepted solution
    within the iteration budget. Returns the number of attempts replayed.
    """
    resolved = solve_with_insertion(system, start, config, record_attempts=True)
    replayed = 0
    for attempt in resolved.attempts:
        if attempt.accepted:
            continue
        enabled = list(attempt.enabled_before) + [attempt.constraint_id]
        ok = attempt_via_public_solve(
            system, enabled, attempt.start_values, config, attempt.rng_state_before
        )
        assert not ok, (
            f"constraint {attempt.constraint_id} was disabled but replaying the "
            "attempt found an accepted solution"
        )
        replayed += 1
    return replayed
