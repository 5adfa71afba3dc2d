"""Sparse prioritized linear constraint systems.

A system holds m constraints (equalities and inequalities) over n densely
indexed variables; m may exceed n. Every constraint carries a unique
positive priority where a smaller number means higher priority, giving a
total order used both for sweep ordering and conflict resolution.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

# Coefficients at or below this magnitude are treated as structural zeros.
COEFF_EPS = 1e-9


class EmptyConstraintError(ValueError):
    """All coefficients of a constraint are structurally zero."""


class DuplicatePriorityError(ValueError):
    """The priority is already used by another constraint in the system."""


class UnknownConstraintError(KeyError):
    """No constraint with the given id exists."""


class Relation(enum.Enum):
    EQ = "eq"
    LE = "le"
    GE = "ge"


@dataclass(frozen=True)
class Constraint:
    """One row: sum(coef * x[var]) <relation> rhs, with a unique priority."""

    id: int
    terms: tuple[tuple[int, float], ...]
    relation: Relation
    rhs: float
    priority: int


@dataclass
class Solution:
    """Dense assignment of all variables of a system."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)

    @classmethod
    def zeros(cls, variable_count: int) -> "Solution":
        return cls(np.zeros(variable_count, dtype=np.float64))

    def copy(self) -> "Solution":
        return Solution(self.values.copy())

    def __len__(self) -> int:
        return int(self.values.shape[0])


class ConstraintSystem:
    """Ordered collection of constraints over variables 0..variable_count-1."""

    def __init__(self, variable_count: int):
        if variable_count < 0:
            raise ValueError("variable_count must be non-negative")
        self.variable_count = variable_count
        self._constraints: list[Constraint] = []
        self._index_of: dict[int, int] = {}
        self._priorities: set[int] = set()
        self._next_id = 0

    @property
    def constraints(self) -> list[Constraint]:
        """Constraints in insertion order. Treat as read-only."""
        return self._constraints

    def __len__(self) -> int:
        return len(self._constraints)

    def constraint(self, constraint_id: int) -> Constraint:
        try:
            return self._constraints[self._index_of[constraint_id]]
        except KeyError:
            raise UnknownConstraintError(constraint_id) from None

    def ids(self) -> list[int]:
        return [c.id for c in self._constraints]

    def add_constraint(
        self,
        terms: Iterable[tuple[int, float]],
        relation: Relation,
        rhs: float,
        priority: int,
    ) -> int:
        """Append a constraint and return its id.

        Coefficients with magnitude <= COEFF_EPS are dropped; if none remain
        the constraint is rejected. Priorities must be unused positive ints.
        """
        kept: list[tuple[int, float]] = []
        seen: set[int] = set()
        for var, coef in terms:
            var = int(var)
            coef = float(coef)
            if abs(coef) <= COEFF_EPS:
                continue
            if var in seen:
                raise ValueError(f"duplicate variable {var} in constraint terms")
            if not 0 <= var < self.variable_count:
                raise ValueError(
                    f"variable {var} out of range for system of {self.variable_count}"
                )
            seen.add(var)
            kept.append((var, coef))
        if not kept:
            raise EmptyConstraintError("constraint has no coefficient above COEFF_EPS")
        priority = int(priority)
        if priority <= 0:
            raise ValueError("priority must be a positive integer")
        if priority in self._priorities:
            raise DuplicatePriorityError(f"priority {priority} already in use")
        if not np.isfinite(rhs):
            raise ValueError("rhs must be finite")
        constraint = Constraint(
            id=self._next_id,
            terms=tuple(kept),
            relation=relation,
            rhs=float(rhs),
            priority=priority,
        )
        self._append(constraint)
        return constraint.id

    def _append(self, constraint: Constraint) -> None:
        self._index_of[constraint.id] = len(self._constraints)
        self._constraints.append(constraint)
        self._priorities.add(constraint.priority)
        self._next_id = max(self._next_id, constraint.id + 1)

    def update_rhs(self, constraint_id: int, new_rhs: float) -> float:
        """Replace the right-hand side of one constraint; returns the old value."""
        if constraint_id not in self._index_of:
            raise UnknownConstraintError(constraint_id)
        if not np.isfinite(new_rhs):
            raise ValueError("rhs must be finite")
        idx = self._index_of[constraint_id]
        old = self._constraints[idx].rhs
        self._constraints[idx] = replace(self._constraints[idx], rhs=float(new_rhs))
        return old

    def to_dict(self) -> dict:
        return {
            "variables": self.variable_count,
            "constraints": [
                {
                    "id": c.id,
                    "terms": [[var, coef] for var, coef in c.terms],
                    "rel": c.relation.value,
                    "rhs": c.rhs,
                    "priority": c.priority,
                }
                for c in self._constraints
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConstraintSystem":
        system = cls(int(data["variables"]))
        for entry in data["constraints"]:
            priority = int(entry["priority"])
            if priority in system._priorities:
                raise DuplicatePriorityError(f"priority {priority} already in use")
            constraint = Constraint(
                id=int(entry["id"]),
                terms=tuple((int(v), float(a)) for v, a in entry["terms"]),
                relation=Relation(entry["rel"]),
                rhs=float(entry["rhs"]),
                priority=priority,
            )
            if constraint.id in system._index_of:
                raise ValueError(f"duplicate constraint id {constraint.id}")
            system._append(constraint)
        return system

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ConstraintSystem":
        return cls.from_dict(json.loads(text))


def residual(constraint: Constraint, solution: Solution) -> float:
    """rhs minus the evaluated left-hand side, in term storage order."""
    total = 0.0
    values = solution.values
    for var, coef in constraint.terms:
        total += coef * float(values[var])
    return constraint.rhs - total


def satisfaction_scale(constraint: Constraint) -> float:
    """Tolerance scale: relative for large rhs, absolute near zero."""
    return max(1.0, abs(constraint.rhs))


def is_satisfied(constraint: Constraint, solution: Solution, tol: float) -> bool:
    """Check the constraint at a scaled tolerance (see satisfaction_scale).

    Comparisons are phrased on the evaluated left-hand side, matching the
    kernels' satisfaction scan bit for bit.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    slack = tol * satisfaction_scale(constraint)
    total = 0.0
    values = solution.values
    for var, coef in constraint.terms:
        total += coef * float(values[var])
    if constraint.relation is Relation.EQ:
        return abs(constraint.rhs - total) <= slack
    if constraint.relation is Relation.LE:
        return total <= constraint.rhs + slack
    return total >= constraint.rhs - slack


def sorted_by_priority(constraints: Sequence[Constraint]) -> list[Constraint]:
    """Highest priority first (smallest priority number first)."""
    return sorted(constraints, key=lambda c: c.priority)
