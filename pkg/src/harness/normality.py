from __future__ import annotations

import math

import numpy as np
from scipy.stats import kstest, norm

from src.harness.schemas import DensityCurve, NormalityReport

DENSITY_GRID_POINTS = 512
# the curve spans 4 bandwidths beyond the data so a point mass keeps its full mass on the grid
DENSITY_SPAN = 4.0
KS_CRITICAL_VALUES = {"0.10": 1.22, "0.05": 1.36, "0.01": 1.63}
MIN_REPLICATIONS = 20


def silverman_bandwidth(count: int) -> float:
    return 1.6 * count ** -0.2


def density_of_mn(mn_values, n: int | None = None) -> DensityCurve:
    values = np.asarray(mn_values, dtype=float)
    if values.size == 0:
        raise ValueError("no normalized deviations to smooth")
    h = silverman_bandwidth(values.size if n is None else n)
    grid = np.linspace(values.min() - DENSITY_SPAN * h, values.max() + DENSITY_SPAN * h, DENSITY_GRID_POINTS)
    density = norm.pdf((grid[:, None] - values[None, :]) / h).mean(axis=1) / h
    return DensityCurve(grid=grid, density=density, bandwidth=h)


def qq_data(mn_values) -> np.ndarray:
    """(theoretical, empirical) quantile pairs at plotting positions (i - 0.5)/B."""
    values = np.sort(np.asarray(mn_values, dtype=float))
    if values.size == 0:
        raise ValueError("no normalized deviations for a QQ plot")
    positions = (np.arange(1, values.size + 1) - 0.5) / values.size
    return np.column_stack((norm.ppf(positions), values))


def normality_check(mn_values) -> NormalityReport:
    values = np.asarray(mn_values, dtype=float)
    if values.size < MIN_REPLICATIONS:
        raise ValueError(f"normality check needs at least {MIN_REPLICATIONS} values, got {values.size}")
    result = kstest(values, "norm")
    scaled = math.sqrt(values.size) * float(result.statistic)
    return NormalityReport(
        replications=int(values.size),
        statistic=float(result.statistic),
        scaled_statistic=scaled,
        p_value=float(result.pvalue),
        critical_values=dict(KS_CRITICAL_VALUES),
        rejected={alpha: scaled > critical for alpha, critical in KS_CRITICAL_VALUES.items()},
    )
