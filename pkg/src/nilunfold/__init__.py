"""Unfolding of a degree-4 nilpotent equilibrium in two degrees of freedom."""

__version__ = "0.1.0"
