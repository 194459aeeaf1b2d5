from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(slots=True, frozen=True)
class LtrcObservation:
    """One observed record: covariate x, lifetime z = min(Y, W), truncation t, status delta."""

    x: tuple[float, ...]
    z: float
    t: float
    delta: int


def _frozen(values: np.ndarray) -> np.ndarray:
    values.setflags(write=False)
    return values


@dataclass(slots=True, frozen=True)
class LtrcSample:
    """Validated observed sample stored column-wise.

    Build it through `src.sample.model.validate_sample` or `LtrcSample.from_arrays`;
    the constructor itself trusts its inputs.
    """

    x: np.ndarray
    z: np.ndarray
    t: np.ndarray
    delta: np.ndarray
    z_sorted_idx: np.ndarray = field(repr=False)
    t_sorted_idx: np.ndarray = field(repr=False)
    z_sorted: np.ndarray = field(repr=False)
    t_sorted: np.ndarray = field(repr=False)

    @classmethod
    def from_arrays(cls, x, z, t, delta) -> "LtrcSample":
        from src.sample.model import check_columns

        x_arr, z_arr, t_arr, d_arr = check_columns(x, z, t, delta)
        z_idx = np.argsort(z_arr, kind="stable")
        t_idx = np.argsort(t_arr, kind="stable")
        return cls(
            x=_frozen(x_arr),
            z=_frozen(z_arr),
            t=_frozen(t_arr),
            delta=_frozen(d_arr),
            z_sorted_idx=_frozen(z_idx),
            t_sorted_idx=_frozen(t_idx),
            z_sorted=_frozen(z_arr[z_idx]),
            t_sorted=_frozen(t_arr[t_idx]),
        )

    @property
    def n(self) -> int:
        return int(self.z.shape[0])

    @property
    def dim(self) -> int:
        return int(self.x.shape[1])

    @property
    def censored_fraction(self) -> float:
        return float(1.0 - self.delta.mean())

    @property
    def has_ties(self) -> bool:
        return bool(
            np.any(np.diff(self.z_sorted) == 0) or np.any(np.diff(self.t_sorted) == 0)
        )

    @property
    def observations(self) -> list[LtrcObservation]:
        return [
            LtrcObservation(
                x=tuple(float(v) for v in self.x[i]),
                z=float(self.z[i]),
                t=float(self.t[i]),
                delta=int(self.delta[i]),
            )
            for i in range(self.n)
        ]
