from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np

from src.errors import NoEffectiveData
from src.regression.schemas import EstimatorConfig
from src.regression.score import admissible
from src.sample.schemas import LtrcSample
from src.survival.schemas import SurvivalFit

logger = logging.getLogger(__name__)


def _synthetic_weights(sample: LtrcSample, fit: SurvivalFit, cfg: EstimatorConfig) -> np.ndarray:
    guard = fit.guard(sample.z)
    mask = admissible(sample, guard, cfg)
    weights = np.zeros(sample.n)
    weights[mask] = 1.0 / guard[mask]
    return weights


def _leave_one_out_roots(
    x: np.ndarray, z: np.ndarray, w: np.ndarray, cfg: EstimatorConfig, h: float
) -> np.ndarray:
    """Root of sum_{j != i} K((X_i - X_j)/h) w_j psi(Z_j - theta) for every i at once.

    Rows whose leave-one-out weights vanish come back as NaN.
    """
    diffs = (x[:, None, :] - x[None, :, :]) / h
    a = cfg.kernel_fn(diffs) * w[None, :]
    np.fill_diagonal(a, 0.0)
    defined = a.sum(axis=1) > 0

    lo = np.full(z.size, z.min() - cfg.bracket_pad)
    hi = np.full(z.size, z.max() + cfg.bracket_pad)
    steps = min(cfg.root_max_iter, max(1, math.ceil(math.log2((hi[0] - lo[0]) / cfg.root_tol))))
    psi = cfg.psi_fn
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        value = np.einsum("ij,ij->i", a, psi(z[None, :] - mid[:, None]))
        positive = value > 0
        lo = np.where(positive, mid, lo)
        hi = np.where(positive, hi, mid)

    roots = 0.5 * (lo + hi)
    roots[~defined] = np.nan
    return roots


def lscv_criterion(sample: LtrcSample, fit: SurvivalFit, cfg: EstimatorConfig, h: float) -> float:
    """sum_i w_i (Z_i - m_{-i}(X_i))^2 over kept records; inf when any fold is undefined."""
    weights = _synthetic_weights(sample, fit, cfg)
    kept = weights > 0
    if kept.sum() < 2:
        raise NoEffectiveData(None)
    x, z, w = sample.x[kept], sample.z[kept], weights[kept]
    roots = _leave_one_out_roots(x, z, w, cfg, h)
    if np.isnan(roots).any():
        return math.inf
    return float(np.sum(w * (z - roots) ** 2))


def lscv_bandwidth(
    sample: LtrcSample, fit: SurvivalFit, cfg_template: EstimatorConfig, grid: Sequence[float]
) -> float:
    candidates = sorted(float(h) for h in grid)
    if not candidates:
        raise ValueError("bandwidth grid is empty")
    if any(h <= 0 for h in candidates):
        raise ValueError("bandwidth candidates must be positive")
    if len(candidates) == 1:
        return candidates[0]

    scores = np.array([lscv_criterion(sample, fit, cfg_template, h) for h in candidates])
    if not np.isfinite(scores).any():
        raise NoEffectiveData(None)
    # argmin returns the first minimum, so ties go to the smaller bandwidth
    best = candidates[int(np.argmin(scores))]
    if best in (candidates[0], candidates[-1]):
        logger.warning(
            "lscv: selected h=%.4f is an endpoint of the grid [%.4f, %.4f]; the minimum may lie outside it",
            best,
            candidates[0],
            candidates[-1],
        )
    logger.debug("lscv: selected h=%.4f among %d candidates", best, len(candidates))
    return best
