from __future__ import annotations

from collections.abc import Callable

import numpy as np

from src.errors import InvalidInterval
from src.sample.step import StepFunction

SMOOTH_GRID_POINTS = 10_000


def sup_distance(
    a: StepFunction,
    b: StepFunction | Callable[[np.ndarray], np.ndarray],
    interval: tuple[float, float],
    grid: np.ndarray | None = None,
) -> float:
    """sup over [lo, hi] of |a - b|.

    Exact when b is a StepFunction or a monotone d.f.: each constant piece of a is checked
    at its start and, through the left limit, at its end.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
        raise InvalidInterval(lo, hi)

    jumps = a.jump_points
    if isinstance(b, StepFunction):
        jumps = np.concatenate((jumps, b.jump_points))
    inside = jumps[(jumps >= lo) & (jumps <= hi)]
    points = np.unique(np.concatenate(([lo, hi], inside)))
    interior = points[points > lo]

    if isinstance(b, StepFunction):
        right = np.abs(a(points) - b(points))
        left = np.abs(a.left_limit(interior) - b.left_limit(interior))
        return float(max(right.max(), left.max(initial=0.0)))

    right = np.abs(a(points) - np.asarray(b(points), dtype=float))
    left = np.abs(a.left_limit(interior) - np.asarray(b(interior), dtype=float))
    if grid is None:
        grid = np.linspace(lo, hi, SMOOTH_GRID_POINTS)
    else:
        grid = np.asarray(grid, dtype=float)
        grid = grid[(grid >= lo) & (grid <= hi)]
    dense = np.abs(a(grid) - np.asarray(b(grid), dtype=float))
    return float(max(right.max(), left.max(initial=0.0), dense.max(initial=0.0)))
