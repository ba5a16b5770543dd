"""Exact invariants of essentially isolated determinantal singularities."""

__version__ = "0.1.0"
