"""Semantic parsing with inverse lambda operators and a probabilistic CCG."""

__version__ = "0.1.0"
