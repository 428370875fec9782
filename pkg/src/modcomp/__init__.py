"""Companion forms and splitting of ordinary Galois representations, computed exactly."""

__version__ = "0.1.0"
