"""Simulation design: alpha-mixing AR(1) covariates observed under truncation and censoring."""
