from __future__ import annotations

import dataclasses
import logging

import numpy as np

from src.errors import EstimatorInvariantError, InvarianceViolation, ZeroRiskSet
from src.sample.model import count_risk_set
from src.sample.schemas import LtrcSample
from src.sample.step import StepFunction
from src.survival.schemas import SurvivalFit

logger = logging.getLogger(__name__)

MU_INVARIANCE_TOL = 1e-9


def _last_in_group(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unique values of a sorted array and the index of the last element of each run."""
    uniq, first = np.unique(points, return_index=True)
    last = np.append(first[1:] - 1, points.size - 1)
    return uniq, last


def _product_limit(points: np.ndarray, factors: np.ndarray, name: str) -> StepFunction:
    """1 - prod_{p_i <= y} factor_i, for points already sorted (ties in input order)."""
    if points.size == 0:
        return StepFunction.constant(0.0, name)
    survival = np.cumprod(factors)
    uniq, last = _last_in_group(points)
    return StepFunction(uniq, 1.0 - survival[last], 0.0, name)


def _sorted_z_columns(sample: LtrcSample) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    z = sample.z_sorted
    delta = sample.delta[sample.z_sorted_idx]
    risk = count_risk_set(sample, z).astype(float)
    return z, delta, risk


def fit_empirical_cdfs(sample: LtrcSample) -> tuple[StepFunction, StepFunction]:
    def ecdf(sorted_values: np.ndarray, name: str) -> StepFunction:
        uniq = np.unique(sorted_values)
        heights = np.searchsorted(sorted_values, uniq, side="right") / sample.n
        return StepFunction(uniq, heights, 0.0, name)

    return ecdf(sample.z_sorted, "h_n_emp"), ecdf(sample.t_sorted, "l_n_emp")


def fit_risk_proportion(sample: LtrcSample) -> StepFunction:
    """C_n as a StepFunction.

    C_n drops just after each Z value; `nextafter(z, inf)` is the next representable
    float, so placing the drop there reproduces C_n exactly at every float.
    """
    points = np.unique(np.concatenate((sample.t_sorted, np.nextafter(sample.z_sorted, np.inf))))
    values = count_risk_set(sample, points) / sample.n
    return StepFunction(points, values, 0.0, "c_n")


def fit_tjw_f(sample: LtrcSample) -> StepFunction:
    z, delta, risk = _sorted_z_columns(sample)
    event = delta == 1
    return _product_limit(z[event], 1.0 - 1.0 / risk[event], "f_n")


def fit_tjw_g(sample: LtrcSample) -> StepFunction:
    z, delta, risk = _sorted_z_columns(sample)
    censored = delta == 0
    return _product_limit(z[censored], 1.0 - 1.0 / risk[censored], "g_n")


def fit_lynden_bell_h(sample: LtrcSample) -> StepFunction:
    z, _, risk = _sorted_z_columns(sample)
    return _product_limit(z, 1.0 - 1.0 / risk, "h_n_lb")


def fit_lynden_bell_l(sample: LtrcSample) -> StepFunction:
    """L_n(y) = prod_{i: T_i > y} (1 - 1/(n C_n(T_i)))."""
    t = sample.t_sorted
    factors = 1.0 - 1.0 / count_risk_set(sample, t).astype(float)
    suffix = np.append(np.cumprod(factors[::-1])[::-1], 1.0)
    uniq, last = _last_in_group(t)
    return StepFunction(uniq, suffix[last + 1], suffix[0], "l_n")


def fit_cumulative_hazard(sample: LtrcSample) -> StepFunction:
    z, delta, risk = _sorted_z_columns(sample)
    event = delta == 1
    if not event.any():
        return StepFunction.constant(0.0, "lambda_n")
    uniq, last = _last_in_group(z[event])
    return StepFunction(uniq, np.cumsum(1.0 / risk[event])[last], 0.0, "lambda_n")


def estimate_mu(sample: LtrcSample, fit: SurvivalFit, y: float) -> float:
    """mu_n = L_n(y) (1 - H_n(y-)) / C_n(y).

    The left limit of H_n makes the value identical at every y with C_n(y) > 0.
    """
    risk = count_risk_set(sample, y)
    if risk == 0:
        raise ZeroRiskSet(y)
    mu = fit.l_n(y) * (1.0 - fit.h_n_lb.left_limit(y)) * sample.n / risk
    assert -1e-12 <= mu <= 1.0 + 1e-9, f"mu_n={mu} outside [0, 1]"
    return float(mu)


def _mu_at_observed(sample: LtrcSample, fit: SurvivalFit) -> np.ndarray:
    z = sample.z_sorted
    risk = count_risk_set(sample, z).astype(float)
    return fit.l_n(z) * (1.0 - fit.h_n_lb.left_limit(z)) * sample.n / risk


def default_mu(sample: LtrcSample, fit: SurvivalFit) -> float:
    values = _mu_at_observed(sample, fit)
    spread = float(values.max() - values.min())
    if spread > MU_INVARIANCE_TOL:
        if not sample.has_ties:
            raise InvarianceViolation(spread)
        logger.warning("tied Z/T values: mu_n varies over evaluation points (spread=%.3e)", spread)
    mu = float(values[0])
    assert -1e-12 <= mu <= 1.0 + 1e-9, f"mu_n={mu} outside [0, 1]"
    return mu


def _check_distribution(curve: StepFunction) -> None:
    if not curve.within(0.0, 1.0):
        raise EstimatorInvariantError(curve.name, "values leave [0, 1]")
    if not curve.is_nondecreasing():
        raise EstimatorInvariantError(curve.name, "not nondecreasing")


def fit_survival(sample: LtrcSample) -> SurvivalFit:
    h_emp, l_emp = fit_empirical_cdfs(sample)
    fit = SurvivalFit(
        n=sample.n,
        c_n=fit_risk_proportion(sample),
        h_n_emp=h_emp,
        l_n_emp=l_emp,
        h_n_lb=fit_lynden_bell_h(sample),
        f_n=fit_tjw_f(sample),
        g_n=fit_tjw_g(sample),
        l_n=fit_lynden_bell_l(sample),
        lambda_n=fit_cumulative_hazard(sample),
        mu_n=float("nan"),
    )
    for curve in (fit.f_n, fit.g_n, fit.l_n, fit.h_n_lb, fit.h_n_emp, fit.l_n_emp):
        _check_distribution(curve)
    if not fit.lambda_n.is_nondecreasing() or fit.lambda_n.value_before_first < 0:
        raise EstimatorInvariantError("lambda_n", "not a nondecreasing nonnegative function")

    fit = dataclasses.replace(fit, mu_n=default_mu(sample, fit))
    logger.debug("survival fit: n=%d mu_n=%.6f", sample.n, fit.mu_n)
    return fit
