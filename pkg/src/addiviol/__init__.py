"""Minimum output Renyi entropy of subspace channels and additivity checks."""

__version__ = "0.1.0"
