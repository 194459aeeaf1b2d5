from __future__ import annotations

import logging
from collections.abc import Iterable

from src.errors import DegenerateDerivative, EstimationError, NoEffectiveData, NotEstimable
from src.regression.schemas import EstimateResult, EstimatorConfig, GridRow
from src.regression.score import (
    build_score,
    confidence_interval,
    sigma_from_score,
    solve_with_diagnostics,
)
from src.sample.schemas import LtrcSample
from src.survival.estimators import fit_survival
from src.survival.schemas import SurvivalFit

logger = logging.getLogger(__name__)

STATUS_BY_ERROR: dict[type[EstimationError], str] = {
    NoEffectiveData: "no_effective_data",
    NotEstimable: "not_estimable",
    DegenerateDerivative: "degenerate_derivative",
}


def status_for(exc: EstimationError) -> str:
    for error_type, status in STATUS_BY_ERROR.items():
        if isinstance(exc, error_type):
            return status
    return "estimation_failed"


class RegressionService:
    """Pointwise robust regression on one LTRC sample: estimate, sigma and interval."""

    def __init__(self, sample: LtrcSample, cfg: EstimatorConfig, fit: SurvivalFit | None = None) -> None:
        self.sample = sample
        self.cfg = cfg
        self.fit = fit if fit is not None else fit_survival(sample)

    def estimate(self, x, eta: float | None = None) -> EstimateResult:
        score = build_score(self.sample, self.fit, self.cfg, x)
        if score.n_effective < self.cfg.min_effective:
            raise NotEstimable(tuple(score.eval_point.tolist()), score.n_effective)

        m_hat, diagnostics = solve_with_diagnostics(score, self.cfg)
        sigma_hat = sigma_from_score(score, self.cfg, m_hat)
        ci_lo, ci_hi = confidence_interval(
            m_hat, sigma_hat, self.cfg.eta if eta is None else eta, self.sample.n, self.cfg, self.sample.dim
        )
        return EstimateResult(
            x=tuple(score.eval_point.tolist()),
            m_hat=m_hat,
            sigma_hat=sigma_hat,
            ci_lo=ci_lo,
            ci_hi=ci_hi,
            n_effective=score.n_effective,
            bandwidth=self.cfg.bandwidth,
            scale=score.scale,
            diagnostics=diagnostics,
        )

    def estimate_grid(self, xs: Iterable[float]) -> list[GridRow]:
        rows: list[GridRow] = []
        for x in xs:
            try:
                result = self.estimate(x)
            except EstimationError as exc:
                logger.warning("grid point x=%s not estimated: %s", x, exc)
                rows.append(GridRow(x=float(x), status=status_for(exc)))
                continue
            rows.append(
                GridRow(
                    x=float(x),
                    m_hat=result.m_hat,
                    sigma_hat=result.sigma_hat,
                    ci_lo=result.ci_lo,
                    ci_hi=result.ci_hi,
                    n_effective=result.n_effective,
                )
            )
        return rows
