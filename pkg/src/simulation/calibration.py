from __future__ import annotations

import logging
import math

import numpy as np
from scipy.optimize import bisect

from src.errors import CalibrationFailed
from src.simulation.generator import LatentStream
from src.simulation.rng import derive_seed
from src.simulation.schemas import SimConfig

logger = logging.getLogger(__name__)

A0_FLOOR = 1e-4
A0_CEILING = 1e3
U0_LEFT = -50.0
U0_RIGHT = 50.0
PILOT_SIZE = 100_000
RATE_TOL = 0.02
XTOL = 1e-10


class PilotRates:
    """Censoring and truncation rates of one fixed pilot draw, for any (a0, u0).

    The pilot keeps unit-rate censoring and centred truncation draws, so W = W1/a0 and
    T = T0 + u0 reuse the same random numbers for every candidate.
    """

    def __init__(self, cfg_template: SimConfig, size: int = PILOT_SIZE) -> None:
        pilot_cfg = cfg_template.model_copy(
            update={"a0": 1.0, "u0": 0.0, "seed": derive_seed(cfg_template.seed, "calibration")}
        )
        draws = LatentStream(pilot_cfg).draw(size)
        self.y = draws.y
        self.w1 = draws.w
        self.t0 = draws.t

    def rates(self, a0: float, u0: float) -> tuple[float, float]:
        w = self.w1 / a0
        z = np.minimum(self.y, w)
        observed = self.t0 + u0 <= z
        tr = 1.0 - observed.mean()
        if not observed.any():
            return 0.0, 1.0
        cr = 1.0 - np.mean(self.y[observed] <= w[observed])
        return float(cr), float(tr)


def solve_increasing(fn, target: float, lo: float, hi: float) -> float:
    """Where the nondecreasing `fn` crosses `target` in [lo, hi]; the nearer end when it never does."""
    if fn(lo) >= target:
        return lo
    if fn(hi) < target:
        return hi
    return float(bisect(lambda v: fn(v) - target, lo, hi, xtol=XTOL))


def calibrate_rates(
    target_cr: float, target_tr: float, cfg_template: SimConfig, max_passes: int = 4
) -> tuple[float, float]:
    """(a0, u0) whose pilot simulation realises the target censoring and truncation rates."""
    for target in (target_cr, target_tr):
        if not 0.0 <= target <= 0.9:
            raise ValueError(f"rate targets must lie in [0, 0.9], got {target!r}")

    pilot = PilotRates(cfg_template)
    a0, u0 = 1.0, 0.0 if target_tr > 0 else U0_LEFT
    cr = tr = float("nan")
    for calibration_pass in range(1, max_passes + 1):
        if target_cr == 0:
            a0 = A0_FLOOR
        else:
            log_a0 = solve_increasing(
                lambda s: pilot.rates(math.exp(s), u0)[0], target_cr, math.log(A0_FLOOR), math.log(A0_CEILING)
            )
            a0 = math.exp(log_a0)
        if target_tr == 0:
            u0 = U0_LEFT
        else:
            u0 = solve_increasing(lambda u: pilot.rates(a0, u)[1], target_tr, U0_LEFT, U0_RIGHT)

        cr, tr = pilot.rates(a0, u0)
        logger.debug("calibration pass %d: a0=%.5f u0=%.5f cr=%.4f tr=%.4f", calibration_pass, a0, u0, cr, tr)
        if calibration_pass >= 2 and abs(cr - target_cr) <= RATE_TOL and abs(tr - target_tr) <= RATE_TOL:
            logger.info("calibrated rates: a0=%.5f u0=%.5f cr=%.4f tr=%.4f", a0, u0, cr, tr)
            return a0, u0

    raise CalibrationFailed(cr, tr)
