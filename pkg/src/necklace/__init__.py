"""Exact noncommutative calculus on quiver path algebras."""

__version__ = "0.1.0"
