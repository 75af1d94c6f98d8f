"""Exact finite-dimensional toolkit for abstract convexity.

Conjugation and H-convexity, cone separation and sandwich witnesses,
subdifferential calculus for sublinear operators, and epsilon and
infinitesimal subdifferentials, all over exact rationals.
"""

__version__ = "0.1.0"
