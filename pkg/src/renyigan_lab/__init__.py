"""Rényi and kth-order generalized GAN losses with numerical verification tools."""

__version__ = "0.1.0"
