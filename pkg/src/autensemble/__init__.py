"""Automorphism-ensemble belief-propagation decoding for CSS LDPC codes."""

__version__ = "0.1.0"
