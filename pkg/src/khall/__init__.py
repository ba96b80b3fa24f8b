"""Exact algebra kernel for K-theoretic Hecke commutator computations."""

__version__ = "0.1.0"
