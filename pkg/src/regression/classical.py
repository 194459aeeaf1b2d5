from __future__ import annotations

import numpy as np

from src.errors import NoEffectiveData
from src.regression.schemas import EstimateResult, EstimatorConfig
from src.regression.score import as_point, build_score, confidence_interval, kernel_values, sigma_from_score
from src.sample.schemas import LtrcSample
from src.survival.schemas import SurvivalFit


def classical_m_hat(sample: LtrcSample, fit: SurvivalFit, cfg: EstimatorConfig, x) -> float:
    """Closed-form identity-psi estimator: sum K delta Z/(L_n Gbar_n) over sum K delta/(L_n Gbar_n)."""
    score = build_score(sample, fit, cfg, x)
    w = score.kept_weights
    return float(np.dot(w, score.kept_z) / w.sum())


def carbonez_m_hat(sample: LtrcSample, fit: SurvivalFit, cfg: EstimatorConfig, x) -> float:
    """Censoring-only comparator whose denominator carries no synthetic-data weights."""
    point = as_point(x, sample.dim)
    k = kernel_values(sample, cfg, point)
    denominator = k.sum()
    if denominator <= 0:
        raise NoEffectiveData(tuple(point))
    g_bar = fit.g_bar(sample.z)
    mask = (sample.delta == 1) & (g_bar > 0)
    numerator = np.sum(k[mask] * sample.z[mask] / g_bar[mask])
    return float(numerator / denominator)


def estimate_classical(sample: LtrcSample, fit: SurvivalFit, cfg: EstimatorConfig, x) -> EstimateResult:
    """Identity-psi estimate with its plug-in variance mu_n Gamma kappa / (sum w)^2."""
    identity_cfg = cfg.with_updates(psi="identity", psi_scale=1.0)
    score = build_score(sample, fit, identity_cfg, x)
    w = score.kept_weights
    m_hat = float(np.dot(w, score.kept_z) / w.sum())
    sigma_hat = sigma_from_score(score, identity_cfg, m_hat)
    ci_lo, ci_hi = confidence_interval(m_hat, sigma_hat, cfg.eta, sample.n, cfg, sample.dim)
    return EstimateResult(
        x=tuple(score.eval_point.tolist()),
        m_hat=m_hat,
        sigma_hat=sigma_hat,
        ci_lo=ci_lo,
        ci_hi=ci_hi,
        n_effective=score.n_effective,
        bandwidth=cfg.bandwidth,
        scale=score.scale,
    )
