"""Uniform and near-uniform sampling of d-factors of dense host graphs by switchings."""

__version__ = "0.1.0"
