from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from src.errors import AcceptanceTooLow
from src.sample.schemas import LtrcSample
from src.simulation.rng import stream
from src.simulation.schemas import GenerationStats, SimConfig

logger = logging.getLogger(__name__)

TRUNCATION_SD = math.sqrt(2.0)
MAX_DRAWS_PER_RECORD = 10**6
MAX_CHUNK = 1_000_000


@dataclass(slots=True, frozen=True)
class LatentDraws:
    x: np.ndarray
    y: np.ndarray
    t: np.ndarray
    w: np.ndarray


class LatentStream:
    """Sequential source of latent (X, Y, T, W) quadruples.

    Successive `draw` calls continue the same four sub-streams and the AR(1) state, so
    the concatenated output does not depend on how the draws are chunked.
    """

    def __init__(self, cfg: SimConfig) -> None:
        self.cfg = cfg
        self._innovations = stream(cfg.seed, "covariate")
        self._noise = stream(cfg.seed, "noise")
        self._censoring = stream(cfg.seed, "censoring")
        self._truncation = stream(cfg.seed, "truncation")
        # X_1 = 0.5 e_1 corresponds to a zero filter state
        self._state = 0.0
        if cfg.burn_in:
            self._covariates(cfg.burn_in)

    def _covariates(self, count: int) -> np.ndarray:
        e = self._innovations.standard_normal(count)
        x, zf = lfilter([0.5], [1.0, -self.cfg.rho], e, zi=[self._state])
        self._state = float(zf[0])
        return x

    def draw(self, count: int) -> LatentDraws:
        if count < 1:
            raise ValueError(f"count must be positive, got {count}")
        x = self._covariates(count)
        y = self.cfg.m_true(x) + self.cfg.sigma_noise * self._noise.standard_normal(count)
        w = self._censoring.exponential(1.0 / self.cfg.a0, count)
        t = self.cfg.u0 + TRUNCATION_SD * self._truncation.standard_normal(count)
        return LatentDraws(x=x, y=y, t=t, w=w)


def gen_latent_stream(cfg: SimConfig, count: int) -> LatentDraws:
    return LatentStream(cfg).draw(count)


def observe(draws: LatentDraws) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(accepted mask, z, delta) under the rule T <= Z = min(Y, W)."""
    z = np.minimum(draws.y, draws.w)
    delta = (draws.y <= draws.w).astype(np.int8)
    return draws.t <= z, z, delta


def gen_ltrc_sample(cfg: SimConfig) -> tuple[LtrcSample, GenerationStats]:
    source = LatentStream(cfg)
    max_draws = MAX_DRAWS_PER_RECORD * cfg.n
    parts: list[tuple[np.ndarray, ...]] = []
    accepted = drawn = 0
    n_drawn = 0
    rate = 0.5

    while accepted < cfg.n:
        if drawn >= max_draws:
            raise AcceptanceTooLow(accepted, drawn)
        remaining = cfg.n - accepted
        chunk = int(min(MAX_CHUNK, max_draws - drawn, max(256, 1.5 * remaining / max(rate, 1e-6))))
        draws = source.draw(chunk)
        keep, z, delta = observe(draws)
        hits = np.flatnonzero(keep)[:remaining]
        if hits.size == remaining:
            n_drawn = drawn + int(hits[-1]) + 1
        parts.append((draws.x[hits], z[hits], draws.t[hits], delta[hits]))
        accepted += hits.size
        drawn += chunk
        rate = max(accepted / drawn, 1e-6)

    x, z, t, delta = (np.concatenate(cols) for cols in zip(*parts))
    sample = LtrcSample.from_arrays(x=x, z=z, t=t, delta=delta)
    stats = GenerationStats(
        n_drawn=n_drawn,
        cr_realized=float(1.0 - delta.mean()),
        tr_realized=1.0 - cfg.n / n_drawn,
    )
    logger.debug(
        "generated sample: n=%d drawn=%d cr=%.3f tr=%.3f", cfg.n, n_drawn, stats.cr_realized, stats.tr_realized
    )
    return sample, stats
