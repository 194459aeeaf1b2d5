from __future__ import annotations

import logging
import math
import time
from collections import Counter
from collections.abc import Sequence

import numpy as np
from joblib import Parallel, delayed

from src.errors import AllReplicationsFailed, EstimationError, SimulationError
from src.harness.normality import density_of_mn, qq_data
from src.harness.schemas import McConfig, McReport, ReplicationOutcome
from src.regression.bandwidth import lscv_bandwidth
from src.regression.score import normal_quantile
from src.regression.service import RegressionService, status_for
from src.simulation.generator import gen_ltrc_sample
from src.simulation.rng import derive_seed
from src.survival.estimators import fit_survival

logger = logging.getLogger(__name__)

OK = "ok"


def replication_seed(seed: int, index: int) -> int:
    return derive_seed(seed, "replication", index)


def _failed(cfg: McConfig, index: int, seed: int, reason: str, started: float, **extra) -> ReplicationOutcome:
    size = len(cfg.x_grid)
    return ReplicationOutcome(
        index=index,
        seed=seed,
        bandwidth=extra.get("bandwidth", math.nan),
        scale=math.nan,
        m_hat=np.full(size, np.nan),
        sigma_hat=np.full(size, np.nan),
        status=(reason,) * size,
        mn=math.nan,
        mn_status=reason,
        cr_realized=extra.get("cr_realized", math.nan),
        tr_realized=extra.get("tr_realized", math.nan),
        elapsed_ms=(time.perf_counter() - started) * 1000,
    )


def run_replication(cfg: McConfig, index: int) -> ReplicationOutcome:
    """Generate replication `index`, pick its bandwidth and estimate on the whole grid."""
    started = time.perf_counter()
    seed = replication_seed(cfg.sim.seed, index)
    try:
        sample, stats = gen_ltrc_sample(cfg.sim.model_copy(update={"seed": seed}))
    except SimulationError as exc:
        logger.warning("replication %d: generation failed: %s", index, exc)
        return _failed(cfg, index, seed, "generation_failed", started)
    rates = {"cr_realized": stats.cr_realized, "tr_realized": stats.tr_realized}

    try:
        fit = fit_survival(sample)
    except EstimationError as exc:
        logger.warning("replication %d: survival fit failed: %s", index, exc)
        return _failed(cfg, index, seed, "survival_failed", started, **rates)

    if cfg.bandwidth_policy == "lscv":
        try:
            bandwidth = lscv_bandwidth(sample, fit, cfg.est, cfg.lscv_grid)
        except EstimationError as exc:
            logger.warning("replication %d: bandwidth selection failed: %s", index, exc)
            return _failed(cfg, index, seed, "bandwidth_failed", started, **rates)
    else:
        bandwidth = cfg.est.bandwidth

    service = RegressionService(sample, cfg.est.with_bandwidth(bandwidth), fit)
    size = len(cfg.x_grid)
    m_hat = np.full(size, np.nan)
    sigma_hat = np.full(size, np.nan)
    status: list[str] = []
    scale = math.sqrt(sample.n * bandwidth)
    for k, x in enumerate(cfg.x_grid):
        try:
            result = service.estimate(x)
        except EstimationError as exc:
            status.append(status_for(exc))
            continue
        m_hat[k], sigma_hat[k] = result.m_hat, result.sigma_hat
        status.append(OK)

    mn, mn_status = math.nan, OK
    try:
        result = service.estimate(cfg.eval_point)
    except EstimationError as exc:
        mn_status = status_for(exc)
    else:
        if result.sigma_hat > 0:
            mn = result.normalized_deviation_scale * (result.m_hat - cfg.sim.m_true(cfg.eval_point))
        else:
            mn_status = "zero_sigma"

    elapsed_ms = (time.perf_counter() - started) * 1000
    logger.debug("replication %d: seed=%d h=%.4f elapsed_ms=%.1f", index, seed, bandwidth, elapsed_ms)
    return ReplicationOutcome(
        index=index,
        seed=seed,
        bandwidth=bandwidth,
        scale=scale,
        m_hat=m_hat,
        sigma_hat=sigma_hat,
        status=tuple(status),
        mn=mn,
        mn_status=mn_status,
        elapsed_ms=elapsed_ms,
        **rates,
    )


def _covered(m_hat: np.ndarray, sigma_hat: np.ndarray, scale: np.ndarray, m_true: np.ndarray, eta: float):
    half = normal_quantile(eta) * sigma_hat / scale[:, None]
    valid = np.isfinite(m_hat) & np.isfinite(half)
    inside = np.abs(m_hat - m_true[None, :]) <= np.where(valid, half, 0.0)
    return inside & valid, valid, half


def coverage_at(report: McReport, eta: float) -> np.ndarray:
    """Per-point coverage of the stored replications when the intervals use level 1 - eta."""
    if not 0 < eta < 1:
        raise ValueError(f"eta must lie in (0, 1), got {eta!r}")
    covered, valid, _ = _covered(report.m_hat, report.sigma_hat, report.scale, report.m_true, eta)
    counts = valid.sum(axis=0)
    return np.divide(covered.sum(axis=0), counts, out=np.full(counts.shape, np.nan), where=counts > 0)


def mn_at_grid(report: McReport, x: float) -> np.ndarray:
    """Finite normalized deviations of every replication at grid point `x`."""
    matches = np.flatnonzero(np.isclose(report.x_grid, x, rtol=0.0, atol=1e-12))
    if matches.size == 0:
        raise ValueError(f"{x!r} is not on the campaign grid")
    column = report.mn_grid[:, matches[0]]
    return column[np.isfinite(column)]


def aggregate(cfg: McConfig, outcomes: Sequence[ReplicationOutcome], elapsed_ms: float = 0.0) -> McReport:
    outcomes = sorted(outcomes, key=lambda o: o.index)
    x_grid = np.asarray(cfg.x_grid, dtype=float)
    m_true = np.asarray(cfg.sim.m_true(x_grid), dtype=float)
    m_hat = np.vstack([o.m_hat for o in outcomes])
    sigma_hat = np.vstack([o.sigma_hat for o in outcomes])
    scale = np.array([o.scale for o in outcomes])
    status = np.array([o.status for o in outcomes], dtype=object)
    ok = status == OK
    m_hat = np.where(ok, m_hat, np.nan)
    sigma_hat = np.where(ok, sigma_hat, np.nan)

    failures = Counter(str(s) for s in status[~ok])
    failures.update(f"mn_{o.mn_status}" for o in outcomes if o.mn_status != OK)
    if not ok.any():
        raise AllReplicationsFailed(dict(failures))

    covered, valid, half = _covered(m_hat, sigma_hat, scale, m_true, cfg.eta)
    n_valid = valid.sum(axis=0)
    has_data = n_valid > 0
    coverage = np.divide(covered.sum(axis=0), n_valid, out=np.full(n_valid.shape, np.nan), where=has_data)
    widths = np.where(valid, 2.0 * half, 0.0)
    avg_width = np.divide(widths.sum(axis=0), n_valid, out=np.full(n_valid.shape, np.nan), where=has_data)

    ci_lo = m_hat - half
    ci_hi = m_hat + half
    bands = np.full((x_grid.size, 3), np.nan)
    for k in np.flatnonzero(has_data):
        rows = valid[:, k]
        bands[k] = (np.median(m_hat[rows, k]), np.median(ci_lo[rows, k]), np.median(ci_hi[rows, k]))

    mn_grid = np.where(valid & (sigma_hat > 0), scale[:, None] / np.where(sigma_hat > 0, sigma_hat, 1.0), np.nan)
    mn_grid = mn_grid * (m_hat - m_true[None, :])
    mn_values = np.array([o.mn for o in outcomes if np.isfinite(o.mn)])

    cr = np.array([o.cr_realized for o in outcomes])
    tr = np.array([o.tr_realized for o in outcomes])
    return McReport(
        x_grid=x_grid,
        m_true=m_true,
        eta=cfg.eta,
        mn_values=mn_values,
        mn_grid=mn_grid,
        coverage=coverage,
        avg_width=avg_width,
        n_valid=n_valid,
        coverage_pooled=float(covered.sum() / valid.sum()),
        coverage_mean=float(np.mean(coverage[has_data])),
        density_curve=density_of_mn(mn_values) if mn_values.size else None,
        qq_pairs=qq_data(mn_values) if mn_values.size else np.empty((0, 2)),
        bands=bands,
        m_hat=m_hat,
        sigma_hat=sigma_hat,
        scale=scale,
        bandwidths=np.array([o.bandwidth for o in outcomes]),
        seeds=tuple(o.seed for o in outcomes),
        per_rep_failures=dict(sorted(failures.items())),
        cr_realized=float(np.nanmean(cr)) if np.isfinite(cr).any() else math.nan,
        tr_realized=float(np.nanmean(tr)) if np.isfinite(tr).any() else math.nan,
        elapsed_ms=elapsed_ms,
    )


def run_campaign(cfg: McConfig) -> McReport:
    started = time.perf_counter()
    workers = max(1, min(cfg.threads, cfg.replications))
    logger.info(
        "campaign start: replications=%d n=%d policy=%s workers=%d",
        cfg.replications,
        cfg.sim.n,
        cfg.bandwidth_policy,
        workers,
    )
    outcomes = Parallel(n_jobs=workers, prefer="threads")(
        delayed(run_replication)(cfg, b) for b in range(cfg.replications)
    )

    report = aggregate(cfg, outcomes, elapsed_ms=(time.perf_counter() - started) * 1000)
    excluded = int(report.failures_per_point.sum())
    if excluded:
        logger.warning("%d (replication, point) pairs excluded: %s", excluded, report.per_rep_failures)
    logger.info(
        (
            "campaign_result\n"
            "  replications: %d\n"
            "  failures: %d\n"
            "  coverage_pooled: %.4f\n"
            "  coverage_mean: %.4f\n"
            "  mean_width: %.4f\n"
            "  cr_realized: %.4f\n"
            "  tr_realized: %.4f\n"
            "  elapsed_ms: %.1f"
        ),
        report.replications,
        excluded,
        report.coverage_pooled,
        report.coverage_mean,
        report.mean_width,
        report.cr_realized,
        report.tr_realized,
        report.elapsed_ms,
    )
    return report
