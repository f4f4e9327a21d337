"""Desk-scale quantum key distribution laboratory."""

__version__ = "0.1.0"
