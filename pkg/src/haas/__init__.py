"""Governance-constrained human-AI task allocation simulator and benchmark workbench."""

__version__ = "0.1.0"
