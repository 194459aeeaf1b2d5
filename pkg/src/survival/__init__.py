"""Product-limit estimators for LTRC data."""

from src.survival.distance import sup_distance
from src.survival.estimators import (
    default_mu,
    estimate_mu,
    fit_cumulative_hazard,
    fit_empirical_cdfs,
    fit_lynden_bell_h,
    fit_lynden_bell_l,
    fit_risk_proportion,
    fit_survival,
    fit_tjw_f,
    fit_tjw_g,
)
from src.survival.schemas import SurvivalFit

__all__ = [
    "SurvivalFit",
    "default_mu",
    "estimate_mu",
    "fit_cumulative_hazard",
    "fit_empirical_cdfs",
    "fit_lynden_bell_h",
    "fit_lynden_bell_l",
    "fit_risk_proportion",
    "fit_survival",
    "fit_tjw_f",
    "fit_tjw_g",
    "sup_distance",
]
