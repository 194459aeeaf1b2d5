from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np
from scipy.optimize import bisect
from scipy.stats import norm

from src.errors import BracketFailure, DegenerateDerivative, NoEffectiveData
from src.regression.schemas import EstimatorConfig, SolverDiagnostics, WeightedScore
from src.sample.schemas import LtrcSample
from src.survival.schemas import SurvivalFit

logger = logging.getLogger(__name__)

MAX_BRACKET_DOUBLINGS = 60


def as_point(x, dim: int) -> np.ndarray:
    point = np.atleast_1d(np.asarray(x, dtype=float)).reshape(-1)
    if point.shape[0] != dim:
        raise ValueError(f"evaluation point has dimension {point.shape[0]}, sample has {dim}")
    return point


def kernel_values(sample: LtrcSample, cfg: EstimatorConfig, point: np.ndarray) -> np.ndarray:
    return cfg.kernel_fn((point[None, :] - sample.x) / cfg.bandwidth)


def admissible(sample: LtrcSample, guard: np.ndarray, cfg: EstimatorConfig) -> np.ndarray:
    """Uncensored records with a nonzero guard, at or below the support bound."""
    mask = (sample.delta == 1) & (guard > 0)
    if cfg.support_bound is not None:
        mask &= sample.z <= cfg.support_bound
    return mask


def build_score(sample: LtrcSample, fit: SurvivalFit, cfg: EstimatorConfig, x) -> WeightedScore:
    point = as_point(x, sample.dim)
    guard = fit.guard(sample.z)
    mask = admissible(sample, guard, cfg)
    k = kernel_values(sample, cfg, point)

    weights = np.zeros(sample.n)
    norm_const = sample.n * cfg.bandwidth**sample.dim
    weights[mask] = fit.mu_n * k[mask] / (guard[mask] * norm_const)
    kept = np.flatnonzero(weights > 0)
    if kept.size == 0:
        raise NoEffectiveData(tuple(point))
    return WeightedScore(
        eval_point=point,
        weights=weights,
        kept_idx=kept,
        z=sample.z,
        guard=guard,
        mu_n=fit.mu_n,
        n=sample.n,
        bandwidth=cfg.bandwidth,
    )


def score_value(score: WeightedScore, cfg: EstimatorConfig, theta: float) -> float:
    return float(np.dot(score.kept_weights, cfg.psi_fn(score.kept_z - theta)))


def solve_with_diagnostics(score: WeightedScore, cfg: EstimatorConfig) -> tuple[float, SolverDiagnostics]:
    if score.n_effective == 0:
        raise NoEffectiveData(tuple(score.eval_point))

    def f(theta: float) -> float:
        return score_value(score, cfg, theta)

    lo = float(score.kept_z.min()) - cfg.bracket_pad
    hi = float(score.kept_z.max()) + cfg.bracket_pad
    expansions = 0
    f_lo, f_hi = f(lo), f(hi)
    while f_lo <= 0 or f_hi >= 0:
        if f_lo == 0:
            return lo, SolverDiagnostics(0, lo, hi, expansions, True)
        if f_hi == 0:
            return hi, SolverDiagnostics(0, lo, hi, expansions, True)
        if expansions >= MAX_BRACKET_DOUBLINGS:
            raise BracketFailure(lo, hi)
        width = hi - lo
        if f_lo < 0:
            lo -= width
            f_lo = f(lo)
        if f_hi > 0:
            hi += width
            f_hi = f(hi)
        expansions += 1

    root, info = bisect(f, lo, hi, xtol=cfg.root_tol, maxiter=cfg.root_max_iter, full_output=True, disp=False)
    if not info.converged:
        logger.warning("bisection stopped before tolerance: flag=%s bracket=[%g, %g]", info.flag, lo, hi)
    logger.debug("m_hat solved: iterations=%d expansions=%d", info.iterations, expansions)
    return float(root), SolverDiagnostics(info.iterations, lo, hi, expansions, bool(info.converged))


def solve_m_hat(score: WeightedScore, cfg: EstimatorConfig) -> float:
    root, _ = solve_with_diagnostics(score, cfg)
    return root


def score_derivative(score: WeightedScore, cfg: EstimatorConfig, theta: float) -> float:
    """d/dtheta of the score: -sum w_i psi'(Z_i - theta)."""
    return -float(np.dot(score.kept_weights, cfg.psi_fn.derivative(score.kept_z - theta)))


def score_gamma(score: WeightedScore, cfg: EstimatorConfig, theta: float) -> float:
    psi = cfg.psi_fn(score.kept_z - theta)
    return float(np.sum(score.kept_weights * psi * psi / score.kept_guard))


def sigma_from_score(score: WeightedScore, cfg: EstimatorConfig, m_hat: float) -> float:
    derivative = score_derivative(score, cfg, m_hat)
    if derivative == 0:
        raise DegenerateDerivative(tuple(score.eval_point))
    kappa = cfg.kernel_fn.squared_integral(score.dim)
    variance = score.mu_n * score_gamma(score, cfg, m_hat) * kappa / derivative**2
    return float(np.sqrt(variance))


def estimate_score_derivative(sample: LtrcSample, fit: SurvivalFit, cfg: EstimatorConfig, x, theta: float) -> float:
    return score_derivative(build_score(sample, fit, cfg, x), cfg, theta)


def estimate_gamma(sample: LtrcSample, fit: SurvivalFit, cfg: EstimatorConfig, x, theta: float) -> float:
    return score_gamma(build_score(sample, fit, cfg, x), cfg, theta)


def estimate_sigma(sample: LtrcSample, fit: SurvivalFit, cfg: EstimatorConfig, x, m_hat: float) -> float:
    return sigma_from_score(build_score(sample, fit, cfg, x), cfg, m_hat)


def normal_quantile(eta: float) -> float:
    """t_{1 - eta/2}, the two-sided standard normal critical value."""
    if not 0 < eta < 1:
        raise ValueError(f"eta must lie in (0, 1), got {eta!r}")
    return float(norm.ppf(1.0 - eta / 2.0))


def confidence_interval(
    m_hat: float, sigma_hat: float, eta: float, n: int, cfg: EstimatorConfig, dim: int = 1
) -> tuple[float, float]:
    half = normal_quantile(eta) * sigma_hat / np.sqrt(n * cfg.bandwidth**dim)
    return float(m_hat - half), float(m_hat + half)


def oracle_score(
    sample: LtrcSample,
    true_mu: float,
    true_l: Callable[[np.ndarray], np.ndarray],
    true_gbar: Callable[[np.ndarray], np.ndarray],
    cfg: EstimatorConfig,
    x,
    theta: float,
) -> float:
    """The score with the population mu, L and Gbar in place of their estimates."""
    point = as_point(x, sample.dim)
    guard = np.asarray(true_l(sample.z), dtype=float) * np.asarray(true_gbar(sample.z), dtype=float)
    mask = (sample.delta == 1) & (guard > 0)
    k = kernel_values(sample, cfg, point)
    terms = k[mask] * cfg.psi_fn(sample.z[mask] - theta) / guard[mask]
    return float(true_mu * terms.sum() / (sample.n * cfg.bandwidth**sample.dim))
