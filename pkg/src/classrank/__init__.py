"""Exact arithmetic pipeline: plane point configurations to cubic fields
with certified class group 2-rank growth."""

__version__ = "0.1.0"
