"""Relayed vs switched QKD network evaluation on uniform rings."""

__version__ = "0.1.0"
