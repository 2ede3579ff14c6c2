"""Exact analysis and simulation of generalized Janken leader selection."""

__version__ = "0.1.0"
