"""Canonical and modified Boerdijk-Coxeter tetrahedral helices."""

__version__ = "0.1.0"
