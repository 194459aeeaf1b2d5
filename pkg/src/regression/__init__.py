"""Kernel M-estimation of the regression function from LTRC data."""
