"""Cavity STIRAP simulation and strong-subadditivity diagnostics."""

__version__ = "0.1.0"
