from __future__ import annotations

from typing import Protocol

import numpy as np


class ObjectiveFunction(Protocol):
    name: str
    scale: float

    def __call__(self, u: np.ndarray) -> np.ndarray: ...

    def derivative(self, u: np.ndarray) -> np.ndarray: ...


class IdentityPsi:
    name = "identity"

    def __init__(self, scale: float = 1.0) -> None:
        self.scale = scale

    def __call__(self, u: np.ndarray) -> np.ndarray:
        return self.scale * np.asarray(u, dtype=float)

    def derivative(self, u: np.ndarray) -> np.ndarray:
        return np.full(np.shape(u), self.scale, dtype=float)


class PseudoHuberPsi:
    """psi(u) = u / sqrt(1 + u^2): odd, bounded, strictly increasing."""

    name = "pseudo_huber"

    def __init__(self, scale: float = 1.0) -> None:
        self.scale = scale

    def __call__(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.scale * u / np.sqrt(1.0 + u * u)

    def derivative(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.scale * (1.0 + u * u) ** -1.5


PSI_FUNCTIONS: dict[str, type] = {
    IdentityPsi.name: IdentityPsi,
    PseudoHuberPsi.name: PseudoHuberPsi,
}


def make_psi(name: str, scale: float = 1.0) -> ObjectiveFunction:
    try:
        return PSI_FUNCTIONS[name](scale)
    except KeyError as exc:
        raise ValueError(f"unknown objective function {name!r}") from exc


def check_psi(psi: ObjectiveFunction) -> None:
    grid = np.linspace(-50.0, 50.0, 10_001)
    if not np.all(psi.derivative(grid) > 0):
        raise ValueError(f"objective function {psi.name!r} is not strictly increasing")
    if not np.allclose(psi(-grid), -psi(grid)):
        raise ValueError(f"objective function {psi.name!r} is not odd")
