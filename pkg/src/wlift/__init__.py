"""Exact simulation of remote W-state preparation from imperfect EPR triples."""

__version__ = "0.1.0"
