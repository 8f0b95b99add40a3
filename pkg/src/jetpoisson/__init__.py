"""Exact construction and verification of Poisson-Lie structures on jet groups."""

__version__ = "0.1.0"
