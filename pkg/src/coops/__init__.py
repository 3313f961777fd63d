"""Odd-primary dual Steenrod algebra, A//E(n) comodules and their Ext groups."""

__version__ = "0.1.0"
ENGINE_VERSION = "1"
