"""Liouvillian first integrals of rational second-order ODEs via S-functions."""

__version__ = "0.1.0"
