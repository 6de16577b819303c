"""Exact q-series tools for partition rank and crank moments and their congruences."""
from __future__ import annotations

__version__ = "0.1.0"

__all__ = ["rings", "linalg", "qseries", "forms", "partitions", "moments", "congruences", "cli"]
