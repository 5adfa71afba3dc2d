import random

import numpy as np
import pytest

from sorlayout import (
    MIN_WINDOW,
    BelowMinimumError,
    Solution,
    SolverConfig,
    big_step,
    generate_layout,
    layout_from_dict,
    layout_to_dict,
    perturb_constraints,
    resize,
    small_step,
    solve,
    solve_with_insertion,
)


class TestGenerate:
    def test_zero_areas_gives_window_only(self):
        layout = generate_layout(0, 800, 600, seed=1)
        assert len(layout.system) == 4
        assert layout.areas == []

    def test_endpoint_201_areas(self):
        layout = generate_layout(201, 800, 600, seed=1)
        assert len(layout.system) == 808

    def test_count_law(self):
        for seed in range(5):
            for n_areas in (0, 1, 3, 10, 33):
                layout = generate_layout(n_areas, 640, 480, seed)
                assert len(layout.system) == 4 * n_areas + 4
                assert len(layout.areas) == n_areas

    def test_single_area_lands_on_window_edges(self):
        layout = generate_layout(1, 800, 600, seed=5)
        assert len(layout.system) == 8
        result = solve(
            layout.system,
            None,
            Solution.zeros(layout.system.variable_count),
            SolverConfig(seed=2),
        )
        assert result.converged
        area = layout.areas[0]
        values = result.solution.values
        expected = {"left": 0.0, "top": 0.0, "right": 800.0, "bottom": 600.0}
        for name, want in expected.items():
            got = values[getattr(area, name)]
            assert got == pytest.approx(want, abs=0.01 * max(1.0, want))

    def test_sparsity_at_most_two_variables(self):
        layout = generate_layout(40, 800, 600, seed=9)
        for c in layout.system.constraints:
            assert 1 <= len(c.terms) <= 2

    def test_window_constraints_have_highest_priorities(self):
        layout = generate_layout(12, 800, 600, seed=3)
        window_prios = {
            layout.system.constraint(cid).priority for cid in layout.window
        }
        assert window_prios == {1, 2, 3, 4}
        others = [
            c.priority
            for c in layout.system.constraints
            if c.id not in set(layout.window)
        ]
        assert all(p >= 5 for p in others)
        assert len(set(others)) == len(others)

    def test_fresh_layouts_solve_conflict_free(self):
        config = SolverConfig(seed=11)
        for seed in range(6):
            layout = generate_layout(15, 800, 600, seed)
            resolved = solve_with_insertion(
                layout.system,
                Solution.zeros(layout.system.variable_count),
                config,
            )
            assert resolved.disabled == []

    def test_deterministic_per_seed(self):
        a = generate_layout(20, 800, 600, seed=42)
        b = generate_layout(20, 800, 600, seed=42)
        assert layout_to_dict(a) == layout_to_dict(b)


class TestResize:
    def test_same_size_leaves_system_unchanged(self):
        layout = generate_layout(5, 300, 300, seed=1)
        before = layout_to_dict(layout)
        resize(layout, 300, 300)
        assert layout_to_dict(layout) == before

    def test_height_only_change_touches_exactly_one_rhs(self):
        layout = generate_layout(5, 300, 300, seed=1)
        before = {c.id: c.rhs for c in layout.system.constraints}
        resize(layout, 300, 170)
        after = {c.id: c.rhs for c in layout.system.constraints}
        changed = [cid for cid in before if before[cid] != after[cid]]
        assert changed == [layout.window[3]]
        assert after[layout.window[3]] == 170.0

    def test_resize_then_solve_satisfies_window(self):
        layout = generate_layout(8, 800, 600, seed=2)
        config = SolverConfig(seed=3)
        resize(layout, 1024, 400)
        resolved = solve_with_insertion(
            layout.system, Solution.zeros(layout.system.variable_count), config
        )
        values = resolved.solution.values
        sys_ = layout.system
        assert values[sys_.constraint(layout.window[2]).terms[0][0]] == pytest.approx(
            1024, rel=0.011
        )
        assert values[sys_.constraint(layout.window[3]).terms[0][0]] == pytest.approx(
            400, rel=0.011
        )

    def test_below_minimum_rejected(self):
        layout = generate_layout(2, 300, 300, seed=1)
        with pytest.raises(BelowMinimumError):
            resize(layout, 5, 300)


class TestSteps:
    def test_small_step_bounds(self):
        layout = generate_layout(2, 800, 600, seed=4)
        rng = random.Random(10)
        for _ in range(10000):
            dw, dh = small_step(layout, rng)
            assert abs(dw) <= 3.0
            assert abs(dh) <= 3.0

    def test_big_step_bounds(self):
        layout = generate_layout(2, 800, 600, seed=4)
        rng = random.Random(10)
        for _ in range(10000):
            dw, dh = big_step(layout, rng)
            assert 4.0 <= abs(dw) <= 3000.0
            assert 4.0 <= abs(dh) <= 3000.0

    def test_clamped_at_minimum(self):
        layout = generate_layout(2, MIN_WINDOW, MIN_WINDOW, seed=4)
        rng = random.Random(1)
        for _ in range(200):
            small_step(layout, rng)
            assert layout.width >= MIN_WINDOW
            assert layout.height >= MIN_WINDOW
        for _ in range(50):
            big_step(layout, rng)
            assert layout.width >= MIN_WINDOW
            assert layout.height >= MIN_WINDOW

    def test_replay_is_deterministic(self):
        deltas_a, deltas_b = [], []
        for out in (deltas_a, deltas_b):
            layout = generate_layout(3, 800, 600, seed=5)
            rng = random.Random(77)
            for _ in range(50):
                out.append(small_step(layout, rng))
        assert deltas_a == deltas_b


class TestPerturb:
    def test_count_at_808_constraints(self):
        layout = generate_layout(201, 800, 600, seed=6)
        changed = perturb_constraints(layout, 0.10, random.Random(1))
        assert len(changed) == 81  # round(80.8)

    def test_zero_k_changes_nothing(self):
        layout = generate_layout(1, 800, 600, seed=6)  # m=8, round(0.4)=0
        before = layout_to_dict(layout)
        changed = perturb_constraints(layout, 0.05, random.Random(2))
        assert changed == []
        assert layout_to_dict(layout) == before

    def test_changed_ids_distinct_and_never_window(self):
        layout = generate_layout(30, 800, 600, seed=7)
        changed = perturb_constraints(layout, 0.25, random.Random(3))
        assert len(changed) == len(set(changed))
        assert not set(changed) & set(layout.window)

    def test_window_never_disabled_after_perturbation(self):
        config = SolverConfig(seed=8)
        for seed in range(4):
            layout = generate_layout(12, 800, 600, seed)
            perturb_constraints(layout, 0.10, random.Random(seed))
            resolved = solve_with_insertion(
                layout.system,
                Solution.zeros(layout.system.variable_count),
                config,
            )
            assert not set(resolved.disabled) & set(layout.window)

    def test_fraction_validation(self):
        layout = generate_layout(2, 800, 600, seed=1)
        with pytest.raises(ValueError):
            perturb_constraints(layout, 0.0, random.Random(1))
        with pytest.raises(ValueError):
            perturb_constraints(layout, 1.5, random.Random(1))


class TestLayoutJson:
    def test_round_trip(self):
        layout = generate_layout(9, 1024, 768, seed=13)
        data = layout_to_dict(layout)
        restored = layout_from_dict(data)
        assert layout_to_dict(restored) == data
        assert restored.window == layout.window
        assert restored.areas == layout.areas

    def test_contains_system_schema(self):
        layout = generate_layout(2, 800, 600, seed=1)
        data = layout_to_dict(layout)
        assert data["variables"] == layout.system.variable_count
        entry = data["constraints"][0]
        assert set(entry) == {"id", "terms", "rel", "rhs", "priority"}
