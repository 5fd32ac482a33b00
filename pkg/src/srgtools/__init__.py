"""Scaled relative graph calculus for fixed-point and splitting methods."""

__version__ = "0.1.0"
