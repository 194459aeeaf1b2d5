"""Monte Carlo campaigns: replications, coverage, normality summaries and result files."""
