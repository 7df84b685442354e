"""Rauzy induction, train-track splitting and harmonic measure experiments."""

__version__ = "0.1.0"
