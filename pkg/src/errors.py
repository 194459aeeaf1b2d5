from __future__ import annotations


class LtrcError(Exception):
    """Root of every domain error raised by the package."""


class SampleError(LtrcError):
    pass


class EstimationError(LtrcError):
    pass


class SimulationError(LtrcError):
    pass


class ConfigError(LtrcError):
    pass


class EmptySample(SampleError):
    def __init__(self) -> None:
        super().__init__("sample is empty")


class InvalidRecord(SampleError):
    def __init__(self, index: int, reason: str) -> None:
        self.index = index
        self.reason = reason
        super().__init__(f"record {index}: {reason}")


class ZeroRiskSet(EstimationError):
    def __init__(self, y: float) -> None:
        self.y = y
        super().__init__(f"risk set is empty at y={y!r}")


class InvarianceViolation(EstimationError):
    def __init__(self, max_spread: float) -> None:
        self.max_spread = max_spread
        super().__init__(f"mu_n depends on the evaluation point (spread={max_spread:.3e})")


class EstimatorInvariantError(EstimationError):
    def __init__(self, name: str, detail: str) -> None:
        self.name = name
        self.detail = detail
        super().__init__(f"{name}: {detail}")


class InvalidInterval(LtrcError, ValueError):
    def __init__(self, lo: float, hi: float) -> None:
        self.lo = lo
        self.hi = hi
        super().__init__(f"invalid interval [{lo!r}, {hi!r}]")


class NoEffectiveData(EstimationError):
    def __init__(self, x) -> None:
        self.x = x
        super().__init__(f"no observation carries positive weight at x={x!r}")


class NotEstimable(EstimationError):
    def __init__(self, x, n_effective: int) -> None:
        self.x = x
        self.n_effective = n_effective
        super().__init__(f"only {n_effective} effective observations at x={x!r}")


class BracketFailure(EstimationError):
    def __init__(self, lo: float, hi: float) -> None:
        self.lo = lo
        self.hi = hi
        super().__init__(f"no sign change of the score on [{lo!r}, {hi!r}]")


class DegenerateDerivative(EstimationError):
    def __init__(self, x) -> None:
        self.x = x
        super().__init__(f"plug-in score derivative vanishes at x={x!r}")


class AcceptanceTooLow(SimulationError):
    def __init__(self, accepted: int, drawn: int) -> None:
        self.accepted = accepted
        self.drawn = drawn
        super().__init__(f"only {accepted} records accepted after {drawn} draws")


class CalibrationFailed(SimulationError):
    def __init__(self, realized_cr: float, realized_tr: float) -> None:
        self.realized_cr = realized_cr
        self.realized_tr = realized_tr
        super().__init__(
            f"calibration did not reach the targets (cr={realized_cr:.4f}, tr={realized_tr:.4f})"
        )


class AllReplicationsFailed(EstimationError):
    def __init__(self, reasons: dict[str, int]) -> None:
        self.reasons = reasons
        super().__init__(f"every replication failed: {reasons}")


class UnknownConfigKey(ConfigError):
    def __init__(self, keys: list[str]) -> None:
        self.keys = keys
        super().__init__(f"unknown configuration keys: {', '.join(sorted(keys))}")
