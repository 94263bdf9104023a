"""Exact enumeration of nodal ribbon graph families and their correlators."""

__version__ = "0.1.0"
