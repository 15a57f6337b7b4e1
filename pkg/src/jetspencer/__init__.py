"""Formal-integrability analysis of linear PDE systems in jet coordinates."""

__version__ = "0.1.0"
