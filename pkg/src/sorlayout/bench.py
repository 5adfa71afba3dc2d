"""Benchmark harness: timed warm vs cold solves plus cubic trend fitting.

For each use case (small-step resize, big-step resize, constraint change)
the harness mutates randomly generated layouts and times the full
insertion solve per change. Cold runs start every solve from zeros, warm
runs from the previous solution. Seeds are derived per (use case, size,
layout) cell so both strategies see identical mutation sequences and the
records pair up one-to-one.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass

import numpy as np

from .engine import SolverConfig
from .layout import LayoutSpec, big_step, generate_layout, perturb_constraints, small_step
from .resolver import solve_with_insertion
from .rng import derive_seed
from .system import Solution

USE_CASES = ("small", "big", "change")
STRATEGIES = ("cold", "warm")

DEFAULT_WIDTH = 800.0
DEFAULT_HEIGHT = 600.0
CHANGE_FRACTION = 0.10

_USE_CASE_CODE = {"small": 1, "big": 2, "change": 3}

CSV_HEADER = (
    "use_case,strategy,n_constraints,layout_seed,change_index,"
    "time_ns,sweeps,converged_fraction,disabled_count"
)


class SingularDesignError(ValueError):
    """Too few distinct sizes to identify the cubic model."""


@dataclass(frozen=True)
class BenchmarkRecord:
    """One timed solve observation."""

    use_case: str
    strategy: str
    n_constraints: int
    layout_seed: int
    change_index: int
    time_ns: int
    sweeps: int
    converged_fraction: float
    disabled_count: int

    def key(self) -> tuple:
        return (
            self.use_case,
            self.strategy,
            self.n_constraints,
            self.layout_seed,
            self.change_index,
        )


@dataclass
class RegressionFit:
    beta0: float
    beta1: float
    beta2: float
    beta3: float
    r_squared: float

    @property
    def betas(self) -> tuple[float, float, float, float]:
        return (self.beta0, self.beta1, self.beta2, self.beta3)


def _apply_mutation(use_case: str, layout: LayoutSpec, rng: random.Random) -> None:
    if use_case == "small":
        small_step(layout, rng)
    elif use_case == "big":
        big_step(layout, rng)
    elif use_case == "change":
        perturb_constraints(layout, CHANGE_FRACTION, rng)
    else:
        raise ValueError(f"unknown use case {use_case!r}")


def run_experiment(
    use_case: str,
    sizes: list[int],
    layouts_per_size: int = 10,
    changes_per_layout: int = 20,
    config: SolverConfig | None = None,
    strategy: str = "cold",
    *,
    initial_width: float = DEFAULT_WIDTH,
    initial_height: float = DEFAULT_HEIGHT,
    backend: str | None = None,
) -> list[BenchmarkRecord]:
    """Time one strategy across sizes; returns one record per change.

    Each layout gets an untimed initial solve plus one untimed warm-up
    change before the timed changes. config.seed acts as master seed.
    """
    if use_case not in USE_CASES:
        raise ValueError(f"use_case must be one of {USE_CASES}")
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}")
    if not sizes:
        raise ValueError("sizes must be nonempty")
    if config is None:
        config = SolverConfig()
    warm = strategy == "warm"
    code = _USE_CASE_CODE[use_case]
    records: list[BenchmarkRecord] = []
    for n_areas in sizes:
        for layout_index in range(layouts_per_size):
            layout_seed = derive_seed(config.seed, code, n_areas, layout_index, 0)
            mutation_rng = random.Random(
                derive_seed(config.seed, code, n_areas, layout_index, 1)
            )
            layout = generate_layout(
                n_areas, initial_width, initial_height, layout_seed
            )
            system = layout.system
            n_constraints = len(system)
            zeros = Solution.zeros(system.variable_count)

            resolved = solve_with_insertion(system, zeros, config, backend=backend)
            previous = resolved.solution
            # Untimed warm-up change.
            _apply_mutation(use_case, layout, mutation_rng)
            start = previous if warm else zeros
            resolved = solve_with_insertion(system, start, config, backend=backend)
            previous = resolved.solution

            for change_index in range(changes_per_layout):
                _apply_mutation(use_case, layout, mutation_rng)
                start = previous if warm else zeros
                resolved = solve_with_insertion(
                    system, start, config, backend=backend
                )
                previous = resolved.solution
                records.append(
                    BenchmarkRecord(
                        use_case=use_case,
                        strategy=strategy,
                        n_constraints=n_constraints,
                        layout_seed=layout_seed,
                        change_index=change_index,
                        time_ns=resolved.wall_time_ns,
                        sweeps=resolved.total_sweeps,
                        converged_fraction=resolved.converged_fraction,
                        disabled_count=len(resolved.disabled),
                    )
                )
    return records


def solve_dense(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gaussian elimination with partial pivoting for small dense systems."""
    a = np.array(a, dtype=np.float64, copy=True)
    b = np.array(b, dtype=np.float64, copy=True)
    n = a.shape[0]
    if a.shape != (n, n) or b.shape != (n,):
        raise ValueError("expected square matrix and matching vector")
    scale = max(1.0, float(np.max(np.abs(a)))) if n else 1.0
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[pivot_row, col]) <= 1e-13 * scale:
            raise SingularDesignError("matrix is numerically singular")
        if pivot_row != col:
            a[[col, pivot_row]] = a[[pivot_row, col]]
            b[[col, pivot_row]] = b[[pivot_row, col]]
        for row in range(col + 1, n):
            factor = a[row, col] / a[col, col]
            if factor != 0.0:
                a[row, col:] -= factor * a[col, col:]
                b[row] -= factor * b[col]
    x = np.zeros(n, dtype=np.float64)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - float(a[row, row + 1 :] @ x[row + 1 :])) / a[row, row]
    return x


def fit_cubic(points: list[tuple[float, float]]) -> RegressionFit:
    """Ordinary least squares for T = b0 + b1*c + b2*c^2 + b3*c^3.

    The design columns are scaled to unit max before forming the normal
    equations; coefficients are unscaled for reporting.
    """
    if len({c for c, _ in points}) < 4:
        raise SingularDesignError("need at least 4 distinct c values")
    c = np.asarray([p[0] for p in points], dtype=np.float64)
    y = np.asarray([p[1] for p in points], dtype=np.float64)
    design = np.column_stack([np.ones_like(c), c, c**2, c**3])
    col_scale = np.max(np.abs(design), axis=0)
    col_scale[col_scale == 0.0] = 1.0
    scaled = design / col_scale
    gram = scaled.T @ scaled
    rhs = scaled.T @ y
    beta = solve_dense(gram, rhs) / col_scale
    predicted = design @ beta
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res == 0.0 else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    return RegressionFit(
        beta0=float(beta[0]),
        beta1=float(beta[1]),
        beta2=float(beta[2]),
        beta3=float(beta[3]),
        r_squared=r_squared,
    )


def fit_groups(
    records: list[BenchmarkRecord],
) -> dict[tuple[str, str], RegressionFit]:
    """Fit the cubic model per (use_case, strategy) group on time_ns."""
    grouped: dict[tuple[str, str], list[tuple[float, float]]] = {}
    for rec in records:
        grouped.setdefault((rec.use_case, rec.strategy), []).append(
            (float(rec.n_constraints), float(rec.time_ns))
        )
    return {key: fit_cubic(points) for key, points in sorted(grouped.items())}


def write_csv(records: list[BenchmarkRecord], path) -> None:
    """Write records sorted by key under the fixed header."""
    with open(path, "w", newline="") as handle:
        handle.write(CSV_HEADER + "\n")
        writer = csv.writer(handle)
        for rec in sorted(records, key=BenchmarkRecord.key):
            writer.writerow(
                [
                    rec.use_case,
                    rec.strategy,
                    rec.n_constraints,
                    rec.layout_seed,
                    rec.change_index,
                    rec.time_ns,
                    rec.sweeps,
                    repr(rec.converged_fraction),
                    rec.disabled_count,
                ]
            )


def read_csv(path) -> list[BenchmarkRecord]:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if ",".join(header) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {header}")
        records = []
        for row in reader:
            records.append(
                BenchmarkRecord(
                    use_case=row[0],
                    strategy=row[1],
                    n_constraints=int(row[2]),
                    layout_seed=int(row[3]),
                    change_index=int(row[4]),
                    time_ns=int(row[5]),
                    sweeps=int(row[6]),
                    converged_fraction=float(row[7]),
                    disabled_count=int(row[8]),
                )
            )
    return records
