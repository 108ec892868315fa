"""Deformed elliptic Ruijsenaars operators and randomized checks of their identities."""

__version__ = "0.1.0"
