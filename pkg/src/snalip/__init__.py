"""Exact tools for pointed metric spaces and Lipschitz function families."""

__version__ = "0.1.0"
