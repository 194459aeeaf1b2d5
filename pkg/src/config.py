from __future__ import annotations

import os
from functools import lru_cache
from pathlib import Path
from typing import Literal

import numpy as np
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.errors import ConfigError, UnknownConfigKey
from src.harness.schemas import DEFAULT_LSCV_GRID, DEFAULT_X_GRID, McConfig
from src.regression.schemas import EstimatorConfig
from src.simulation.schemas import SimConfig

DEFAULT_OUTPUT_ROOT = Path("results")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=(".env", ".env.local"),
        extra="ignore",
    )

    ltrc_threads: int = Field(
        default_factory=lambda: os.cpu_count() or 1,
        ge=1,
        alias="LTRC_THREADS",
    )
    ltrc_log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        default="INFO",
        alias="LTRC_LOG_LEVEL",
    )
    ltrc_debug_mode: bool = Field(default=False, alias="LTRC_DEBUG_MODE")
    ltrc_output_root: Path = Field(default=DEFAULT_OUTPUT_ROOT, alias="LTRC_OUTPUT_ROOT")

    @field_validator("ltrc_log_level", mode="before")
    @classmethod
    def _upper_level(cls, value):
        return value.upper() if isinstance(value, str) else value

    @field_validator("ltrc_output_root", mode="before")
    @classmethod
    def _expand_user_path(cls, value: Path | str) -> Path | str:
        if isinstance(value, Path):
            return value.expanduser()
        if isinstance(value, str):
            return Path(value).expanduser()
        return value

    @property
    def effective_log_level(self) -> str:
        return "DEBUG" if self.ltrc_debug_mode else self.ltrc_log_level


@lru_cache
def get_settings() -> Settings:
    return Settings()


class Cell(BaseModel):
    """One (TR, CR, n) cell of the coverage table; rates in percent."""

    model_config = ConfigDict(frozen=True)

    tr: float = Field(ge=0, le=90)
    cr: float = Field(ge=0, le=90)
    n: int = Field(ge=1)

    def render(self) -> str:
        return f"{self.tr:g}/{self.cr:g}/{self.n}"


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


def parse_grid(text: str) -> tuple[float, ...]:
    """`a,b,c` or the inclusive range `lo:hi:step`."""
    if ":" not in text:
        return _float_list(text)
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must read lo:hi:step, got {text!r}")
    lo, hi, step = (float(part) for part in parts)
    if step <= 0 or hi < lo:
        raise ValueError(f"empty range {text!r}")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return tuple(round(lo + k * step, 12) for k in range(count))


# every (TR, CR, n) cell of the coverage table, rates in percent
TABLE1_CELLS = ";".join(f"{tr}/{cr}/{n}" for tr in (20, 60) for cr in (10, 40) for n in (50, 100, 300))


def parse_cells(text: str) -> tuple[Cell, ...]:
    """`TR/CR/n` triples separated by `;`, or `table1` for the full coverage table."""
    if text.strip() == "table1":
        text = TABLE1_CELLS
    cells = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        parts = chunk.strip().split("/")
        if len(parts) != 3:
            raise ValueError(f"cell must read TR/CR/n, got {chunk!r}")
        cells.append(Cell(tr=float(parts[0]), cr=float(parts[1]), n=int(parts[2])))
    return tuple(cells)


def _render(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, tuple):
        if value and isinstance(value[0], Cell):
            return ";".join(cell.render() for cell in value)
        return ",".join(_render(v) for v in value)
    return str(value)


class RunConfig(BaseModel):
    """Flat key=value configuration shared by every CLI subcommand."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = Field(default=20240601, ge=0, lt=2**64)
    rho: float = Field(default=0.9, ge=0, lt=1)
    sigma_noise: float = Field(default=0.1, gt=0)
    slope: float = 2.0
    intercept: float = 0.0
    a0: float = Field(default=0.5, gt=0)
    u0: float = -1.0
    n: int = Field(default=100, ge=1)
    burn_in: int = Field(default=0, ge=0)
    target_cr: float | None = Field(default=None, ge=0, le=0.9)
    target_tr: float | None = Field(default=None, ge=0, le=0.9)

    kernel: Literal["gaussian", "epanechnikov"] = "gaussian"
    psi: Literal["identity", "pseudo_huber"] = "pseudo_huber"
    psi_scale: float = Field(default=1.0, gt=0)
    bandwidth: float = Field(default=1.13, gt=0)
    bandwidth_policy: Literal["fixed", "lscv"] = "fixed"
    lscv_grid: tuple[float, ...] = DEFAULT_LSCV_GRID
    support_bound: float | None = None
    root_tol: float = Field(default=1e-10, gt=0)
    root_max_iter: int = Field(default=200, ge=1)
    bracket_pad: float = Field(default=1.0, gt=0)
    min_effective: int = Field(default=5, ge=1)
    eta: float = Field(default=0.05, gt=0, lt=1)

    replications: int = Field(default=200, ge=1)
    x_grid: tuple[float, ...] = DEFAULT_X_GRID
    eval_point: float = 0.0

    delimiter: str = ","
    header: bool | None = None
    cells: tuple[Cell, ...] = ()

    @field_validator("support_bound", "target_cr", "target_tr", "header", mode="before")
    @classmethod
    def _blank_is_none(cls, value):
        if isinstance(value, str) and not value.strip():
            return None
        return value

    @field_validator("lscv_grid", mode="before")
    @classmethod
    def _parse_list(cls, value):
        return _float_list(value) if isinstance(value, str) else value

    @field_validator("x_grid", mode="before")
    @classmethod
    def _parse_x_grid(cls, value):
        return parse_grid(value) if isinstance(value, str) else value

    @field_validator("cells", mode="before")
    @classmethod
    def _parse_cells(cls, value):
        return parse_cells(value) if isinstance(value, str) else value

    @field_validator("x_grid", "lscv_grid")
    @classmethod
    def _non_empty(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if not value:
            raise ValueError("grid must not be empty")
        return value

    @field_validator("delimiter")
    @classmethod
    def _single_char(cls, value: str) -> str:
        if value == "\\t":
            return "\t"
        if len(value) != 1:
            raise ValueError(f"delimiter must be one character, got {value!r}")
        return value

    def to_sim_config(self, a0: float | None = None, u0: float | None = None, n: int | None = None) -> SimConfig:
        return SimConfig(
            rho=self.rho,
            sigma_noise=self.sigma_noise,
            slope=self.slope,
            intercept=self.intercept,
            a0=self.a0 if a0 is None else a0,
            u0=self.u0 if u0 is None else u0,
            n=self.n if n is None else n,
            seed=self.seed,
            burn_in=self.burn_in,
        )

    def to_estimator_config(self) -> EstimatorConfig:
        return EstimatorConfig(
            kernel=self.kernel,
            psi=self.psi,
            psi_scale=self.psi_scale,
            bandwidth=self.bandwidth,
            support_bound=self.support_bound,
            root_tol=self.root_tol,
            root_max_iter=self.root_max_iter,
            bracket_pad=self.bracket_pad,
            min_effective=self.min_effective,
            eta=self.eta,
        )

    def to_mc_config(self, sim: SimConfig | None = None, threads: int = 1) -> McConfig:
        return McConfig(
            sim=self.to_sim_config() if sim is None else sim,
            est=self.to_estimator_config(),
            replications=self.replications,
            x_grid=self.x_grid,
            eta=self.eta,
            eval_point=self.eval_point,
            bandwidth_policy=self.bandwidth_policy,
            lscv_grid=self.lscv_grid,
            threads=threads,
        )

    def as_flat(self) -> dict[str, str]:
        rendered = {key: _render(getattr(self, key)) for key in type(self).model_fields}
        if rendered["delimiter"] == "\t":
            rendered["delimiter"] = "\\t"
        return rendered

    def to_kv_text(self) -> str:
        return "".join(f"{key}={value}\n" for key, value in self.as_flat().items())


def parse_overrides(pairs: list[str]) -> dict[str, str]:
    values: dict[str, str] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"override must read key=value, got {pair!r}")
        values[key.strip()] = value.strip()
    return values


def load_run_config(path: Path | None = None, overrides: list[str] | None = None) -> RunConfig:
    """File values, then `--set` overrides; unknown keys are rejected before validation."""
    values: dict[str, str] = {}
    if path is not None:
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        values.update({k: v for k, v in dotenv_values(path).items() if v is not None})
    values.update(parse_overrides(overrides or []))

    unknown = [key for key in values if key not in RunConfig.model_fields]
    if unknown:
        raise UnknownConfigKey(unknown)
    return RunConfig.model_validate(values)
