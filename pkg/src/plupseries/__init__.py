"""Exact power-series analysis of parametrized local-update processes."""
__version__ = "0.1.0"
