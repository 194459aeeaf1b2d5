from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(slots=True, frozen=True)
class StepFunction:
    """Right-continuous piecewise-constant function on the real line.

    `values[k]` holds on [jump_points[k], jump_points[k+1]); `value_before_first`
    holds on (-inf, jump_points[0]).
    """

    jump_points: np.ndarray
    values: np.ndarray
    value_before_first: float
    name: str = ""

    def __post_init__(self) -> None:
        points = np.asarray(self.jump_points, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if points.ndim != 1 or points.shape != values.shape:
            raise ValueError("jump_points and values must be 1-D arrays of equal length")
        if points.size > 1 and np.any(np.diff(points) <= 0):
            raise ValueError("jump_points must be strictly increasing")
        points.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "jump_points", points)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "value_before_first", float(self.value_before_first))

    @classmethod
    def constant(cls, value: float, name: str = "") -> "StepFunction":
        return cls(np.empty(0), np.empty(0), value, name)

    def _lookup(self, idx: np.ndarray) -> np.ndarray:
        padded = np.concatenate(([self.value_before_first], self.values))
        return padded[idx]

    def __call__(self, y):
        y_arr = np.asarray(y, dtype=float)
        out = self._lookup(np.searchsorted(self.jump_points, y_arr, side="right"))
        return float(out) if out.ndim == 0 else out

    def left_limit(self, y):
        """Value at y-, the largest jump point strictly below y."""
        y_arr = np.asarray(y, dtype=float)
        out = self._lookup(np.searchsorted(self.jump_points, y_arr, side="left"))
        return float(out) if out.ndim == 0 else out

    def complement(self, name: str = "") -> "StepFunction":
        return StepFunction(self.jump_points, 1.0 - self.values, 1.0 - self.value_before_first, name)

    def is_nondecreasing(self) -> bool:
        seq = np.concatenate(([self.value_before_first], self.values))
        return bool(np.all(np.diff(seq) >= 0))

    def is_nonincreasing(self) -> bool:
        seq = np.concatenate(([self.value_before_first], self.values))
        return bool(np.all(np.diff(seq) <= 0))

    def within(self, lo: float, hi: float) -> bool:
        seq = np.concatenate(([self.value_before_first], self.values))
        return bool(np.all((seq >= lo) & (seq <= hi)))
