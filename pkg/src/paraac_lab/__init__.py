"""Parameterized AC0 lab: circuits, restrictions and reductions for clique-type problems."""

__version__ = "0.1.0"
