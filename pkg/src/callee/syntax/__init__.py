"""Concrete and abstract syntax of the core language."""
