from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.regression.schemas import EstimatorConfig
from src.simulation.schemas import SimConfig

DEFAULT_X_GRID = tuple(round(-1.0 + 0.1 * k, 10) for k in range(21))
DEFAULT_LSCV_GRID = (0.04, 0.05, 0.07, 0.1, 0.13, 0.16, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0, 1.13, 1.3, 1.6, 2.0)


class McConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    sim: SimConfig
    est: EstimatorConfig
    replications: int = Field(default=200, ge=1)
    x_grid: tuple[float, ...] = DEFAULT_X_GRID
    eta: float = Field(default=0.05, gt=0, lt=1)
    eval_point: float = 0.0
    bandwidth_policy: Literal["fixed", "lscv"] = "fixed"
    lscv_grid: tuple[float, ...] = DEFAULT_LSCV_GRID
    threads: int = Field(default=1, ge=1)

    @field_validator("x_grid", "lscv_grid")
    @classmethod
    def _non_empty(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if not value:
            raise ValueError("grid must not be empty")
        return value


@dataclass(slots=True, frozen=True)
class ReplicationOutcome:
    index: int
    seed: int
    bandwidth: float
    scale: float
    m_hat: np.ndarray
    sigma_hat: np.ndarray
    status: tuple[str, ...]
    mn: float
    mn_status: str
    cr_realized: float
    tr_realized: float
    elapsed_ms: float


@dataclass(slots=True, frozen=True)
class DensityCurve:
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float

    def mass(self) -> float:
        from scipy.integrate import trapezoid

        return float(trapezoid(self.density, self.grid))


@dataclass(slots=True, frozen=True)
class McReport:
    """Aggregates of one campaign plus the per-replication estimates they came from."""

    x_grid: np.ndarray
    m_true: np.ndarray
    eta: float
    mn_values: np.ndarray
    mn_grid: np.ndarray
    coverage: np.ndarray
    avg_width: np.ndarray
    n_valid: np.ndarray
    coverage_pooled: float
    coverage_mean: float
    density_curve: DensityCurve | None
    qq_pairs: np.ndarray
    bands: np.ndarray
    m_hat: np.ndarray
    sigma_hat: np.ndarray
    scale: np.ndarray
    bandwidths: np.ndarray
    seeds: tuple[int, ...]
    per_rep_failures: dict[str, int] = field(default_factory=dict)
    cr_realized: float = float("nan")
    tr_realized: float = float("nan")
    elapsed_ms: float = 0.0

    @property
    def replications(self) -> int:
        return int(self.m_hat.shape[0])

    @property
    def failures_per_point(self) -> np.ndarray:
        return self.replications - self.n_valid

    @property
    def mean_width(self) -> float:
        total = np.sum(self.avg_width * self.n_valid)
        return float(total / self.n_valid.sum()) if self.n_valid.sum() else float("nan")


class NormalityReport(BaseModel):
    replications: int
    statistic: float
    scaled_statistic: float
    p_value: float
    critical_values: dict[str, float]
    rejected: dict[str, bool]


class Table1Row(BaseModel):
    tr_target: float
    cr_target: float
    n: int
    a0: float
    u0: float
    coverage: float | None = None
    coverage_mean: float | None = None
    avg_width: float | None = None
    cr_realized: float | None = None
    tr_realized: float | None = None
    failures: int = 0
    status: str = "ok"


class RunManifest(BaseModel):
    """Replay record written next to every CLI output."""

    command: str
    seed: int | None = None
    config: dict[str, str]
    outputs: list[str] = Field(default_factory=list)
    elapsed_ms: float = 0.0
    replication_seeds: list[int] = Field(default_factory=list)
    coverage_aggregation: Literal["pooled"] | None = None
    coverage_pooled: float | None = None
    coverage_mean: float | None = None
    failures: dict[str, int] = Field(default_factory=dict)
    normality: NormalityReport | None = None
    notes: list[str] = Field(default_factory=list)
