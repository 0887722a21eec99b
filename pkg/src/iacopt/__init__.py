"""Multiobjective optimizer for Infrastructure-as-Code deployments described in DOML."""

__version__ = "0.1.0"
