from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.regression.kernels import Kernel, check_kernel, make_kernel
from src.regression.psi import ObjectiveFunction, check_psi, make_psi


class EstimatorConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    kernel: Literal["gaussian", "epanechnikov"] = "gaussian"
    psi: Literal["identity", "pseudo_huber"] = "pseudo_huber"
    psi_scale: float = Field(default=1.0, gt=0)
    bandwidth: float = Field(default=1.13, gt=0)
    # None means "largest observed Z"
    support_bound: float | None = None
    root_tol: float = Field(default=1e-10, gt=0)
    root_max_iter: int = Field(default=200, ge=1)
    bracket_pad: float = Field(default=1.0, gt=0)
    min_effective: int = Field(default=5, ge=1)
    eta: float = Field(default=0.05, gt=0, lt=1)

    @model_validator(mode="after")
    def _check_functions(self) -> "EstimatorConfig":
        check_kernel(self.kernel_fn)
        check_psi(self.psi_fn)
        return self

    @property
    def kernel_fn(self) -> Kernel:
        return make_kernel(self.kernel)

    @property
    def psi_fn(self) -> ObjectiveFunction:
        return make_psi(self.psi, self.psi_scale)

    def with_bandwidth(self, bandwidth: float) -> "EstimatorConfig":
        if not bandwidth > 0:
            raise ValueError(f"bandwidth must be positive, got {bandwidth!r}")
        return self.model_copy(update={"bandwidth": float(bandwidth)})

    def with_updates(self, **changes) -> "EstimatorConfig":
        """Copy with changes, re-running validation (unlike `model_copy`)."""
        return EstimatorConfig(**{**self.model_dump(), **changes})


@dataclass(slots=True, frozen=True)
class WeightedScore:
    """Synthetic-data weights of the kernel score at one evaluation point.

    `weights[i] = mu_n K((x - X_i)/h) delta_i / (L_n(Z_i) Gbar_n(Z_i) n h^d)`, zero for
    excluded records; `guard[i] = L_n(Z_i) Gbar_n(Z_i)`.
    """

    eval_point: np.ndarray
    weights: np.ndarray
    kept_idx: np.ndarray
    z: np.ndarray
    guard: np.ndarray
    mu_n: float
    n: int
    bandwidth: float

    @property
    def dim(self) -> int:
        return int(self.eval_point.shape[0])

    @property
    def n_effective(self) -> int:
        return int(self.kept_idx.size)

    @property
    def kept_z(self) -> np.ndarray:
        return self.z[self.kept_idx]

    @property
    def kept_weights(self) -> np.ndarray:
        return self.weights[self.kept_idx]

    @property
    def kept_guard(self) -> np.ndarray:
        return self.guard[self.kept_idx]

    @property
    def scale(self) -> float:
        """sqrt(n h^d), the normalisation of the asymptotic distribution."""
        return float(np.sqrt(self.n * self.bandwidth**self.dim))


@dataclass(slots=True, frozen=True)
class SolverDiagnostics:
    iterations: int
    bracket_lo: float
    bracket_hi: float
    expansions: int
    converged: bool


@dataclass(slots=True, frozen=True)
class EstimateResult:
    x: tuple[float, ...]
    m_hat: float
    sigma_hat: float
    ci_lo: float
    ci_hi: float
    n_effective: int
    bandwidth: float
    scale: float
    diagnostics: SolverDiagnostics | None = None

    @property
    def width(self) -> float:
        return self.ci_hi - self.ci_lo

    @property
    def normalized_deviation_scale(self) -> float:
        return self.scale / self.sigma_hat if self.sigma_hat > 0 else float("inf")


class GridRow(BaseModel):
    """One row of the grid-estimation CSV; failed points keep only x and status."""

    x: float
    m_hat: float | None = None
    sigma_hat: float | None = None
    ci_lo: float | None = None
    ci_hi: float | None = None
    n_effective: int | None = None
    status: str = "ok"
