"""Exception hierarchy for monopole-lab."""

from __future__ import annotations

from typing import Any


class MonopoleLabError(Exception):
    """Base class for every runtime failure raised by the package."""


class LatticeError(MonopoleLabError):
    """Shape, degree or dimension mismatch on a lattice object."""


class FluxError(MonopoleLabError):
    """Invalid flux data, or a spinor section on a background that has none."""


class GaugeFixError(MonopoleLabError):
    """The Coulomb-gauge Poisson solve did not reach its tolerance."""

    def __init__(self, message: str, residual: float) -> None:
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class SolverError(MonopoleLabError):
    """Line search failed; ``last`` holds the last accepted iterate."""

    def __init__(self, message: str, last: Any = None) -> None:
        super().__init__(message)
        self.last = last


class TemporalGaugeError(MonopoleLabError):
    """A 4-d configuration is not in temporal gauge."""

    def __init__(self, message: str, violation: float) -> None:
        super().__init__(f"{message} (max violation {violation:.3e})")
        self.violation = violation


class TopologyError(MonopoleLabError):
    """Invalid topological input (degenerate form, bad degree or rank)."""
