"""Numerical core: fBm sampling, the fundamental transform, likelihood and CUSUM."""
