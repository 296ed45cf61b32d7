"""Numerical verification engine for two-component spinor calculus with torsion."""

__version__ = "0.1.0"
