"""Reference implementation of an object-oriented language whose effects are method calls."""

__version__ = "0.1.0"
