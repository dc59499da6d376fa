"""Monte Carlo experiments, report files and the property suite."""
