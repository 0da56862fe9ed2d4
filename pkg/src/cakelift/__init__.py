"""Cake wavelets, orientation scores on SE(2, N) and angular uncertainty gaps."""

__version__ = "0.1.0"
