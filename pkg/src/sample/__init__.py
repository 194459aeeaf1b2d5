"""Observed-data model for left-truncated right-censored samples."""

from src.sample.model import count_risk_set, validate_sample
from src.sample.schemas import LtrcObservation, LtrcSample
from src.sample.step import StepFunction

__all__ = ["LtrcObservation", "LtrcSample", "StepFunction", "count_risk_set", "validate_sample"]
