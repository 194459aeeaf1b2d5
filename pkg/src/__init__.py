"""Robust kernel M-estimation of regression for left-truncated right-censored dependent data."""
