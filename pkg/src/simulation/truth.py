from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.stats import expon, norm

from src.simulation.generator import TRUNCATION_SD
from src.simulation.schemas import SimConfig


@dataclass(slots=True, frozen=True)
class TrueModel:
    """Population quantities of the simulation design.

    The lifetime marginal uses the stationary AR(1) variance 0.25 / (1 - rho^2); samples
    generated with `burn_in = 0` start below stationarity, so use a burn-in when comparing
    against these curves.
    """

    cfg: SimConfig
    y_mean: float
    y_sd: float
    mu: float
    cr: float

    @property
    def tr(self) -> float:
        return 1.0 - self.mu

    def lifetime_cdf(self, y):
        return norm.cdf(y, loc=self.y_mean, scale=self.y_sd)

    def censoring_cdf(self, w):
        return expon.cdf(w, scale=1.0 / self.cfg.a0)

    def censoring_sf(self, w):
        return expon.sf(w, scale=1.0 / self.cfg.a0)

    def truncation_cdf(self, t):
        return norm.cdf(t, loc=self.cfg.u0, scale=TRUNCATION_SD)

    def observed_cdf(self, z):
        return 1.0 - (1.0 - self.lifetime_cdf(z)) * self.censoring_sf(z)

    def quantile_f(self, p: float) -> float:
        return float(norm.ppf(p, loc=self.y_mean, scale=self.y_sd))


def true_model(cfg: SimConfig) -> TrueModel:
    x_var = 0.25 / (1.0 - cfg.rho**2)
    y_mean = cfg.intercept
    y_sd = math.sqrt(cfg.slope**2 * x_var + cfg.sigma_noise**2)
    f = norm(loc=y_mean, scale=y_sd)
    g = expon(scale=1.0 / cfg.a0)

    def trunc_cdf(u: float) -> float:
        return norm.cdf(u, loc=cfg.u0, scale=TRUNCATION_SD)

    # density of Z = min(Y, W) split into its uncensored and censored parts
    def uncensored(u: float) -> float:
        return trunc_cdf(u) * f.pdf(u) * g.sf(u)

    def censored(u: float) -> float:
        return trunc_cdf(u) * g.pdf(u) * f.sf(u)

    p_uncensored = quad(uncensored, -np.inf, 0.0)[0] + quad(uncensored, 0.0, np.inf)[0]
    p_censored = quad(censored, 0.0, np.inf)[0]
    mu = p_uncensored + p_censored
    return TrueModel(cfg=cfg, y_mean=y_mean, y_sd=y_sd, mu=mu, cr=p_censored / mu)
