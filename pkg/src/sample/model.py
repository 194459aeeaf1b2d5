from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from src.errors import EmptySample, InvalidRecord
from src.sample.schemas import LtrcObservation, LtrcSample

logger = logging.getLogger(__name__)


def check_columns(x, z, t, delta) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    z_arr = np.array(z, dtype=float).reshape(-1)
    t_arr = np.array(t, dtype=float).reshape(-1)
    d_raw = np.array(delta, dtype=float).reshape(-1)
    n = z_arr.shape[0]
    if n == 0:
        raise EmptySample()

    x_arr = np.array(x, dtype=float)
    if x_arr.ndim == 1:
        x_arr = x_arr.reshape(n, 1) if x_arr.shape[0] == n else x_arr.reshape(1, -1)
    if x_arr.ndim != 2 or x_arr.shape[0] != n or x_arr.shape[1] < 1:
        raise InvalidRecord(0, f"covariate block has shape {x_arr.shape}, expected ({n}, d)")
    if t_arr.shape[0] != n or d_raw.shape[0] != n:
        raise InvalidRecord(min(t_arr.shape[0], d_raw.shape[0]), "column lengths differ")

    finite = np.isfinite(z_arr) & np.isfinite(t_arr) & np.all(np.isfinite(x_arr), axis=1)
    bad_delta = (d_raw != 0.0) & (d_raw != 1.0)
    bad_order = t_arr > z_arr
    for mask, reason in ((~finite, "non-finite value"), (bad_delta, "delta not in {0,1}"), (bad_order, "t > z")):
        if mask.any():
            raise InvalidRecord(int(np.flatnonzero(mask)[0]), reason)

    return x_arr, z_arr, t_arr, d_raw.astype(np.int8)


def validate_sample(raw: Sequence[LtrcObservation]) -> LtrcSample:
    if len(raw) == 0:
        raise EmptySample()

    dims = {len(obs.x) for obs in raw}
    if len(dims) != 1:
        width = len(raw[0].x)
        index = next(i for i, obs in enumerate(raw) if len(obs.x) != width)
        raise InvalidRecord(index, "covariate dimension differs from the first record")

    sample = LtrcSample.from_arrays(
        x=[obs.x for obs in raw],
        z=[obs.z for obs in raw],
        t=[obs.t for obs in raw],
        delta=[obs.delta for obs in raw],
    )
    logger.debug("validated sample: n=%d d=%d censored=%.3f", sample.n, sample.dim, sample.censored_fraction)
    return sample


def count_risk_set(sample: LtrcSample, y):
    """#{j : T_j <= y <= Z_j}, vectorised over y.

    Every record has T_j <= Z_j, so the risk set is {T_j <= y} minus {Z_j < y}.
    """
    y_arr = np.asarray(y, dtype=float)
    entered = np.searchsorted(sample.t_sorted, y_arr, side="right")
    left = np.searchsorted(sample.z_sorted, y_arr, side="left")
    counts = entered - left
    if counts.ndim == 0:
        return int(counts)
    return counts
