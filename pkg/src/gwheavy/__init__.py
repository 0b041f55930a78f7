"""Conditional Galton-Watson trees: samplers, heavy-path statistics,
Apollonian networks, exact small-size oracles and limit-law numerics."""

__version__ = "0.1.0"
