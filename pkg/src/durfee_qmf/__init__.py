"""Rank-type multisums at roots of unity and their quantum modular completion."""

__version__ = "0.1.0"
