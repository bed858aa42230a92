"""Symmetric determinantal ideals, their classification and G-biliaison descent."""

__version__ = "0.1.0"
