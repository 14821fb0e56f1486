"""Limit higher Chow cycles on a degenerate K3, their regulator matrix, and
K2 regulator integrals on elliptic curves."""

__version__ = "0.1.0"
