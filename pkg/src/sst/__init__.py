"""Subgraph-to-subgraph transitions: labeling, counting and link prediction."""

__version__ = "0.1.0"
