"""Numerical laboratory for the semilinear wave equation with scale-invariant damping."""

__version__ = "0.1.0"
