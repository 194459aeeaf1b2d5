from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel

from src.sample.step import StepFunction


@dataclass(slots=True, frozen=True)
class SurvivalFit:
    n: int
    c_n: StepFunction
    h_n_emp: StepFunction
    l_n_emp: StepFunction
    h_n_lb: StepFunction
    f_n: StepFunction
    g_n: StepFunction
    l_n: StepFunction
    lambda_n: StepFunction
    mu_n: float

    def curves(self) -> dict[str, StepFunction]:
        return {
            "c_n": self.c_n,
            "h_n_emp": self.h_n_emp,
            "l_n_emp": self.l_n_emp,
            "h_n_lb": self.h_n_lb,
            "f_n": self.f_n,
            "g_n": self.g_n,
            "l_n": self.l_n,
            "lambda_n": self.lambda_n,
        }

    def g_bar(self, z) -> np.ndarray:
        return 1.0 - np.asarray(self.g_n(z))

    def guard(self, z) -> np.ndarray:
        """L_n(z) * (1 - G_n(z)), the denominator of the synthetic-data weights."""
        return np.asarray(self.l_n(z)) * self.g_bar(z)


class CurveMetadata(BaseModel):
    estimator: str
    n: int
    mu_n: float
    value_before_first: float
    jump_count: int
