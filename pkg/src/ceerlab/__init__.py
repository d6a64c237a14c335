"""Desk-scale workbench for computably enumerable equivalence relations."""

__version__ = "0.1.0"
