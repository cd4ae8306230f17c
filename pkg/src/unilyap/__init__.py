"""Decide uniform Lyapunov exponents modulo 0 for tuples of real matrices."""

__version__ = "0.1.0"
