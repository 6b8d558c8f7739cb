"""Gamma-matrix representations and sitewise Clifford algebra.

Spinor fibers are stored as complex arrays whose leading axis holds the
spinor components; any trailing axes are lattice sites. Two-forms are
stored as coefficient vectors over the pairs ``i < j`` in lexicographic
order, the same layout the lattice uses for 2-cochains.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from src.errors import LatticeError

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
IDENTITY2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class GammaRep:
    """Skew-Hermitian generators with e_i e_j + e_j e_i = -2 delta_ij."""

    dim: int
    generators: np.ndarray
    chirality: np.ndarray | None = None

    @property
    def fiber_dim(self) -> int:
        return self.generators.shape[1]

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return list(combinations(range(self.dim), 2))

    def bivector(self, i: int, j: int) -> np.ndarray:
        return self.generators[i] @ self.generators[j]

    def plus_block(self, matrix: np.ndarray) -> np.ndarray:
        """Restriction of an even element to S+ (top-left 2x2 block)."""
        return matrix[:2, :2] if self.dim == 4 else matrix

    @property
    def bivectors_plus(self) -> np.ndarray:
        """e_i e_j restricted to S+, stacked in pair order."""
        return _bivector_table(self.dim)

    @property
    def dirac_plus_blocks(self) -> np.ndarray:
        """Blocks B_u with (D+ psi) = sum_u B_u nabla_u psi."""
        if self.dim == 4:
            return self.generators[:, 2:, :2]
        return self.generators

    @property
    def dirac_minus_blocks(self) -> np.ndarray:
        if self.dim == 4:
            return self.generators[:, :2, 2:]
        return self.generators


@dataclass(frozen=True)
class SpinorFiber:
    """A chiral pair (plus, minus); ``minus`` is empty in odd dimension."""

    plus: np.ndarray
    minus: np.ndarray

    @classmethod
    def from_full(cls, rep: GammaRep, full: np.ndarray) -> SpinorFiber:
        if rep.dim == 4:
            return cls(plus=full[:2], minus=full[2:])
        return cls(plus=full, minus=np.zeros((0,) + full.shape[1:], dtype=complex))

    def full(self) -> np.ndarray:
        return np.concatenate([self.plus, self.minus], axis=0)


@lru_cache(maxsize=None)
def _build(dim: int) -> GammaRep:
    if dim == 4:
        generators = np.zeros((4, 4, 4), dtype=complex)
        for k in range(3):
            generators[k, :2, 2:] = 1j * SIGMA[k]
            generators[k, 2:, :2] = 1j * SIGMA[k]
        generators[3, :2, 2:] = IDENTITY2
        generators[3, 2:, :2] = -IDENTITY2
        chirality = np.diag([1, 1, -1, -1]).astype(complex)
        return GammaRep(dim=4, generators=generators, chirality=chirality)
    if dim == 3:
        return GammaRep(dim=3, generators=1j * SIGMA.copy())
    raise LatticeError(f"no gamma representation for dimension {dim}")


def build_gamma_rep(dim: int) -> GammaRep:
    """Return the fixed representation for ``dim`` in {3, 4}."""
    rep = _build(dim)
    rep.generators.setflags(write=False)
    return rep


@lru_cache(maxsize=None)
def _bivector_table(dim: int) -> np.ndarray:
    rep = _build(dim)
    table = np.stack(
        [rep.plus_block(rep.bivector(i, j)) for i, j in combinations(range(dim), 2)]
    )
    table.setflags(write=False)
    return table


def clifford_mul(
    rep: GammaRep, v: np.ndarray, s: np.ndarray | SpinorFiber
) -> np.ndarray | SpinorFiber:
    """Clifford product of a vector ``v`` (shape (dim, ...)) on a spinor."""
    wrapped = isinstance(s, SpinorFiber)
    full = s.full() if wrapped else np.asarray(s)
    v = np.asarray(v)
    if v.shape[0] != rep.dim or full.shape[0] != rep.fiber_dim:
        raise LatticeError(
            f"clifford_mul: vector has {v.shape[0]} components and spinor "
            f"{full.shape[0]}, representation needs {rep.dim} and {rep.fiber_dim}"
        )
    out = np.einsum("k...,kab,b...->a...", v, rep.generators, full)
    return SpinorFiber.from_full(rep, out) if wrapped else out


def _pair_coefficients(rep: GammaRep, w: np.ndarray) -> np.ndarray:
    w = np.asarray(w)
    n_pairs = len(rep.pairs)
    if w.shape[:2] == (rep.dim, rep.dim):
        return np.stack([w[i, j] for i, j in rep.pairs])
    if w.shape[0] == n_pairs:
        return w
    raise LatticeError(
        f"two-form must have {n_pairs} pair components or be {rep.dim}x{rep.dim}"
    )


def two_form_action(rep: GammaRep, w: np.ndarray, s: np.ndarray) -> np.ndarray:
    """rho(w) = sum_{i<j} w_ij e_i e_j acting on an S+ spinor (or 3-d spinor).

    ``w`` is either an antisymmetric (dim, dim) matrix or a pair-coefficient
    vector, optionally with trailing site axes matching ``s``.
    """
    coeffs = _pair_coefficients(rep, w)
    return np.einsum("p...,pab,b...->a...", coeffs, rep.bivectors_plus, s)


def bivector_pairings(rep: GammaRep, psi: np.ndarray) -> np.ndarray:
    """<e_i e_j psi, psi> for every pair; purely imaginary up to round-off."""
    return np.einsum("a...,pab,b...->p...", psi.conj(), rep.bivectors_plus, psi)


def quadratic_form(rep: GammaRep, psi: np.ndarray) -> np.ndarray:
    """q(psi)_ij = Im<e_i e_j psi, psi> / 4, as pair coefficients.

    The result is self-dual in dimension four.
    """
    return bivector_pairings(rep, psi).imag / 4.0


def quadratic_form_derivative(
    rep: GammaRep, psi: np.ndarray, phi: np.ndarray
) -> np.ndarray:
    """Directional derivative of ``quadratic_form`` at ``psi`` along ``phi``."""
    return np.einsum("a...,pab,b...->p...", phi.conj(), rep.bivectors_plus, psi).imag / 2.0


def spinor_current(rep: GammaRep, psi: np.ndarray) -> np.ndarray:
    """v_k = Im<e_k psi, psi> for the 3-d representation (= psi^H sigma_k psi)."""
    if rep.dim != 3:
        raise LatticeError("spinor_current is defined for the 3-d representation")
    return np.einsum("a...,kab,b...->k...", psi.conj(), rep.generators, psi).imag
