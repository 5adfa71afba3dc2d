import random

import numpy as np
import pytest

from sorlayout import (
    Solution,
    SolverConfig,
    available_backends,
    get_kernel,
    solve,
    solve_with_insertion,
)
from helpers import random_small_system

needs_compiled = pytest.mark.skipif(
    "c" not in available_backends(), reason="compiled kernel not built"
)


def test_python_backend_always_available():
    assert "python" in available_backends()
    assert get_kernel("python") is not None


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        get_kernel("fortran")


@needs_compiled
class TestBackendParity:
    def test_solve_bitwise_identical(self):
        rng = random.Random(1234)
        for trial in range(40):
            system = random_small_system(rng, max_vars=4, max_cons=8)
            n = system.variable_count
            config = SolverConfig(seed=trial, max_iterations=200)
            start = Solution(np.array([rng.uniform(-5, 5) for _ in range(n)]))
            results = {
                name: solve(system, None, start, config, backend=name)
                for name in ("c", "python")
            }
            c_res, py_res = results["c"], results["python"]
            assert c_res.solution.values.tobytes() == py_res.solution.values.tobytes()
            assert c_res.iterations == py_res.iterations
            assert c_res.converged == py_res.converged
            assert (
                np.float64(c_res.final_error).tobytes()
                == np.float64(py_res.final_error).tobytes()
            )

    def test_insertion_bitwise_identical(self):
        rng = random.Random(99)
        for trial in range(15):
            system = random_small_system(rng, max_vars=3, max_cons=6)
            config = SolverConfig(seed=trial)
            start = Solution.zeros(system.variable_count)
            c_res = solve_with_insertion(system, start, config, backend="c")
            py_res = solve_with_insertion(system, start, config, backend="python")
            assert c_res.solution.values.tobytes() == py_res.solution.values.tobytes()
            assert c_res.enabled == py_res.enabled
            assert c_res.disabled == py_res.disabled
            assert c_res.total_sweeps == py_res.total_sweeps

    def test_check_satisfied_identical(self):
        from sorlayout.engine import CompiledSystem

        rng = random.Random(7)
        for _ in range(25):
            system = random_small_system(rng, max_vars=4, max_cons=6)
            compiled = CompiledSystem(system)
            x = np.array(
                [rng.uniform(-6, 6) for _ in range(system.variable_count)]
            )
            order = compiled.priority_rows
            args = (
                compiled.row_ptr,
                compiled.cols,
                compiled.coefs,
                compiled.rel,
                compiled.rhs,
                order,
                x,
                0.01,
            )
            assert get_kernel("c").check_satisfied(*args) == get_kernel(
                "python"
            ).check_satisfied(*args)
