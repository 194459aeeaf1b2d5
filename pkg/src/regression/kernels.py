from __future__ import annotations

import math
from typing import Protocol

import numpy as np
from scipy.integrate import trapezoid
from scipy.stats import norm


class Kernel(Protocol):
    name: str

    def __call__(self, u: np.ndarray) -> np.ndarray:
        """Evaluate on scaled differences; the last axis holds the d coordinates."""
        ...

    def squared_integral(self, dim: int) -> float: ...


class GaussianKernel:
    """Standard normal density, product form in d > 1."""

    name = "gaussian"

    def __call__(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return np.prod(norm.pdf(u), axis=-1)

    def squared_integral(self, dim: int) -> float:
        return (1.0 / (2.0 * math.sqrt(math.pi))) ** dim


class EpanechnikovKernel:
    name = "epanechnikov"

    def __call__(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != 1:
            raise ValueError("the Epanechnikov kernel is only available for d = 1")
        v = u[..., 0]
        return np.where(np.abs(v) <= 1.0, 0.75 * (1.0 - v * v), 0.0)

    def squared_integral(self, dim: int) -> float:
        if dim != 1:
            raise ValueError("the Epanechnikov kernel is only available for d = 1")
        return 0.6


KERNELS: dict[str, type] = {
    GaussianKernel.name: GaussianKernel,
    EpanechnikovKernel.name: EpanechnikovKernel,
}


def make_kernel(name: str) -> Kernel:
    try:
        return KERNELS[name]()
    except KeyError as exc:
        raise ValueError(f"unknown kernel {name!r}") from exc


def check_kernel(kernel: Kernel, tol: float = 1e-6) -> None:
    grid = np.linspace(-10.0, 10.0, 200_001)
    values = kernel(grid[:, None])
    if np.any(values < 0):
        raise ValueError(f"kernel {kernel.name!r} takes negative values")
    mass = trapezoid(values, grid)
    if abs(mass - 1.0) > tol:
        raise ValueError(f"kernel {kernel.name!r} integrates to {mass:.8f}, not 1")
