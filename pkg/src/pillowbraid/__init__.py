"""Braid monodromy of the branch curve of the (2,2)-pillow degeneration."""

__version__ = "0.1.0"
