"""Monopole Lab - lattice monopole equations, flows and topological calculators."""

__version__ = "0.1.0"
