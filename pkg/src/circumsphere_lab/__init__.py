"""Circumspheres of n+1 uniform random points in the unit d-ball.

Monte-Carlo simulation of the circumsphere geometry alongside the closed
forms for its distributions, moments and containment probabilities.
"""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:
    __version__ = "0.0.0"

__all__ = ["__version__"]
