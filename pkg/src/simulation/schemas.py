from __future__ import annotations

import io

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field

from src.errors import UnknownConfigKey


class SimConfig(BaseModel):
    """Simulation design: AR(1) covariate, linear response, Exp censoring, normal truncation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    # rho = 0 gives i.i.d. covariates; the study uses 0.9
    rho: float = Field(default=0.9, ge=0, lt=1)
    sigma_noise: float = Field(default=0.1, gt=0)
    slope: float = 2.0
    intercept: float = 0.0
    a0: float = Field(default=0.5, gt=0)
    # truncation times are N(u0, 2) read as variance 2, i.e. standard deviation sqrt(2)
    u0: float = -1.0
    n: int = Field(default=100, ge=1)
    seed: int = Field(default=20240601, ge=0, lt=2**64)
    burn_in: int = Field(default=0, ge=0)

    def m_true(self, x):
        return self.intercept + self.slope * x

    def to_kv_text(self) -> str:
        return "".join(f"{key}={value}\n" for key, value in self.model_dump().items())

    @classmethod
    def from_kv_text(cls, text: str) -> "SimConfig":
        values = dotenv_values(stream=io.StringIO(text))
        unknown = [key for key in values if key not in cls.model_fields]
        if unknown:
            raise UnknownConfigKey(unknown)
        return cls(**{key: value for key, value in values.items() if value is not None})


class GenerationStats(BaseModel):
    n_drawn: int = Field(ge=1)
    cr_realized: float = Field(ge=0, le=1)
    tr_realized: float = Field(ge=0, lt=1)
