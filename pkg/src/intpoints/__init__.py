"""Integral points on hyperelliptic curves: descent, explicit bounds from
linear forms in logarithms, and the Mordell-Weil sieve."""

__version__ = "0.1.0"
