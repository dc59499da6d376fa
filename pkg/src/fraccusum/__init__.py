"""CUSUM change detection for fractional Brownian motion observations."""

__version__ = "0.1.0"
