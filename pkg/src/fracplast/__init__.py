"""Nonlocal fractional model of rate-independent plasticity in one dimension."""

__version__ = "0.1.0"
