"""Random constraint-based GUI layouts and their runtime mutations.

A layout is produced by recursively splitting the window rectangle at
fresh tabstop variables. Every final region becomes an area contributing
four equality constraints that pin its bounding tabstops to the generated
pixel coordinates, and four window-edge constraints carry the highest
priorities. Neighbouring areas share tabstops, so the pins overlap
consistently and the system is over-determined but conflict-free until a
resize or constraint change makes some pins stale.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .system import ConstraintSystem, Relation

MIN_WINDOW = 10.0

# Window-edge constraints always occupy the four highest priorities.
_WINDOW_PRIORITIES = (1, 2, 3, 4)


class BelowMinimumError(ValueError):
    """Requested window size is below the minimum supported dimensions."""


@dataclass(frozen=True)
class Area:
    """Tabstop variables bounding one widget rectangle."""

    left: int
    top: int
    right: int
    bottom: int


@dataclass
class LayoutSpec:
    system: ConstraintSystem
    areas: list[Area]
    window: tuple[int, int, int, int]  # constraint ids: left, top, right, bottom
    width: float
    height: float
    x_tabs: list[int]
    y_tabs: list[int]


@dataclass
class _Region:
    left: int
    top: int
    right: int
    bottom: int
    x0: float
    y0: float
    x1: float
    y1: float


def generate_layout(
    n_areas: int, width: float, height: float, seed: int
) -> LayoutSpec:
    """Generate a conflict-free random layout with 4*n_areas + 4 constraints."""
    if width <= 0 or height <= 0:
        raise ValueError("width and height must be positive")
    if n_areas < 0:
        raise ValueError("n_areas must be non-negative")
    rng = random.Random(seed)

    # Variables 0..3 are the window-edge tabstops.
    x_tabs = [0, 2]
    y_tabs = [1, 3]
    next_var = 4
    regions: list[_Region] = []
    if n_areas >= 1:
        regions.append(_Region(0, 1, 2, 3, 0.0, 0.0, float(width), float(height)))
    for _ in range(max(0, n_areas - 1)):
        idx = rng.randrange(len(regions))
        region = regions[idx]
        vertical = rng.random() < 0.5
        frac = rng.uniform(0.25, 0.75)
        tab = next_var
        next_var += 1
        if vertical:
            pos = region.x0 + frac * (region.x1 - region.x0)
            x_tabs.append(tab)
            first = _Region(
                region.left, region.top, tab, region.bottom,
                region.x0, region.y0, pos, region.y1,
            )
            second = _Region(
                tab, region.top, region.right, region.bottom,
                pos, region.y0, region.x1, region.y1,
            )
        else:
            pos = region.y0 + frac * (region.y1 - region.y0)
            y_tabs.append(tab)
            first = _Region(
                region.left, region.top, region.right, tab,
                region.x0, region.y0, region.x1, pos,
            )
            second = _Region(
                region.left, tab, region.right, region.bottom,
                region.x0, pos, region.x1, region.y1,
            )
        regions[idx] = first
        regions.append(second)

    system = ConstraintSystem(next_var)
    left_id = system.add_constraint([(0, 1.0)], Relation.EQ, 0.0, 1)
    top_id = system.add_constraint([(1, 1.0)], Relation.EQ, 0.0, 2)
    right_id = system.add_constraint([(2, 1.0)], Relation.EQ, float(width), 3)
    bottom_id = system.add_constraint([(3, 1.0)], Relation.EQ, float(height), 4)

    priorities = list(range(5, 5 + 4 * n_areas))
    rng.shuffle(priorities)
    areas: list[Area] = []
    p = 0
    for region in regions:
        areas.append(Area(region.left, region.top, region.right, region.bottom))
        for var, value in (
            (region.left, region.x0),
            (region.top, region.y0),
            (region.right, region.x1),
            (region.bottom, region.y1),
        ):
            system.add_constraint([(var, 1.0)], Relation.EQ, value, priorities[p])
            p += 1

    return LayoutSpec(
        system=system,
        areas=areas,
        window=(left_id, top_id, right_id, bottom_id),
        width=float(width),
        height=float(height),
        x_tabs=x_tabs,
        y_tabs=y_tabs,
    )


def resize(layout: LayoutSpec, new_width: float, new_height: float) -> None:
    """Adjust the window size; only the right/bottom edge rhs values change."""
    if new_width < MIN_WINDOW or new_height < MIN_WINDOW:
        raise BelowMinimumError(
            f"window must be at least {MIN_WINDOW}x{MIN_WINDOW} px"
        )
    layout.system.update_rhs(layout.window[2], float(new_width))
    layout.system.update_rhs(layout.window[3], float(new_height))
    layout.width = float(new_width)
    layout.height = float(new_height)


def _random_resize(
    layout: LayoutSpec, rng: random.Random, lo: float, hi: float
) -> tuple[float, float]:
    dw = rng.uniform(lo, hi)
    if rng.random() < 0.5:
        dw = -dw
    dh = rng.uniform(lo, hi)
    if rng.random() < 0.5:
        dh = -dh
    new_width = max(MIN_WINDOW, layout.width + dw)
    new_height = max(MIN_WINDOW, layout.height + dh)
    resize(layout, new_width, new_height)
    return dw, dh


def small_step(layout: LayoutSpec, rng: random.Random) -> tuple[float, float]:
    """Resize both dimensions by a magnitude in [0, 3] px with random sign."""
    return _random_resize(layout, rng, 0.0, 3.0)


def big_step(layout: LayoutSpec, rng: random.Random) -> tuple[float, float]:
    """Resize both dimensions by a magnitude in [4, 3000] px with random sign."""
    return _random_resize(layout, rng, 4.0, 3000.0)


def perturb_constraints(
    layout: LayoutSpec, fraction: float, rng: random.Random
) -> list[int]:
    """Give round(fraction * m) distinct non-window constraints a new rhs.

    New values are drawn uniformly in [0, max(width, height)], which is wide
    enough to create occasional conflicts on purpose. Returns the changed
    constraint ids.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must lie in (0, 1]")
    m = len(layout.system)
    window_ids = set(layout.window)
    candidates = [c.id for c in layout.system.constraints if c.id not in window_ids]
    k = min(round(fraction * m), len(candidates))
    if k <= 0:
        return []
    chosen = rng.sample(candidates, k)
    hi = max(layout.width, layout.height)
    for cid in chosen:
        layout.system.update_rhs(cid, rng.uniform(0.0, hi))
    return chosen


def layout_to_dict(layout: LayoutSpec) -> dict:
    data = layout.system.to_dict()
    data.update(
        {
            "width": layout.width,
            "height": layout.height,
            "window": list(layout.window),
            "areas": [
                {"left": a.left, "top": a.top, "right": a.right, "bottom": a.bottom}
                for a in layout.areas
            ],
            "x_tabs": list(layout.x_tabs),
            "y_tabs": list(layout.y_tabs),
        }
    )
    return data


def layout_from_dict(data: dict) -> LayoutSpec:
    system = ConstraintSystem.from_dict(data)
    return LayoutSpec(
        system=system,
        areas=[
            Area(int(a["left"]), int(a["top"]), int(a["right"]), int(a["bottom"]))
            for a in data["areas"]
        ],
        window=tuple(int(i) for i in data["window"]),  # type: ignore[arg-type]
        width=float(data["width"]),
        height=float(data["height"]),
        x_tabs=[int(v) for v in data["x_tabs"]],
        y_tabs=[int(v) for v in data["y_tabs"]],
    )
