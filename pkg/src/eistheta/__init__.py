"""Eisenstein theta lift on modular curves: exact q-expansions and kernel numerics."""

__version__ = "0.1.0"
