"""Exact computations on symbolic trees: dimensions, configuration embeddings,
CP chains, detecting functions and return-time sets of finite systems."""

__version__ = "0.1.0"
