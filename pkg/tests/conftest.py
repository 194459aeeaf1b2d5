from __future__ import annotations

import numpy as np
import pytest

from src.regression.schemas import EstimatorConfig
from src.sample.schemas import LtrcSample
from src.simulation.generator import gen_ltrc_sample
from src.simulation.schemas import SimConfig
from src.survival.estimators import fit_survival


def make_sample(x, z, t, delta) -> LtrcSample:
    return LtrcSample.from_arrays(x=x, z=z, t=t, delta=delta)


def degenerate_sample(x, z) -> LtrcSample:
    """No truncation (T = 0) and no censoring; z must be nonnegative."""
    z = np.asarray(z, dtype=float)
    return make_sample(x, z, np.zeros_like(z), np.ones_like(z))


@pytest.fixture(scope="session")
def sim_cfg() -> SimConfig:
    """First seed from 7 on whose risk set has no gap, so mu_n > 0."""
    for seed in range(7, 107):
        cfg = SimConfig(n=200, seed=seed, burn_in=200)
        sample, _ = gen_ltrc_sample(cfg)
        if fit_survival(sample).mu_n > 0:
            return cfg
    raise RuntimeError("no usable simulated sample")


@pytest.fixture(scope="session")
def sim_sample(sim_cfg):
    sample, _ = gen_ltrc_sample(sim_cfg)
    return sample


@pytest.fixture(scope="session")
def sim_fit(sim_sample):
    return fit_survival(sim_sample)


@pytest.fixture(scope="session")
def est_cfg() -> EstimatorConfig:
    return EstimatorConfig()


@pytest.fixture(scope="session")
def identity_cfg() -> EstimatorConfig:
    return EstimatorConfig(psi="identity")


def random_sample(rng: np.random.Generator, n: int) -> LtrcSample:
    """Continuous LTRC draws with no ties: exponential lifetimes and censoring, T below Z."""
    y = rng.exponential(2.0, size=n)
    w = rng.exponential(rng.uniform(1.0, 6.0), size=n)
    z = np.minimum(y, w)
    t = z - rng.exponential(rng.uniform(0.2, 3.0), size=n)
    return make_sample(rng.normal(size=n), z, t, (y <= w).astype(int))
