"""Quaternionic contact structures on Lie groups and the special holonomy metrics they generate."""

__version__ = "0.1.0"
