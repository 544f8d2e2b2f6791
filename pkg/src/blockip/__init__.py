"""Exact solver for block-structured linear and integer programs."""

__version__ = "0.1.0"
