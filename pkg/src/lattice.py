"""Periodic cubical lattices, cochains and the flux backgrounds on them.

A k-cochain is stored as its coefficient array of shape ``(C(d, k), *sizes)``
with components ordered lexicographically by the sorted direction tuples.
The exterior derivative is the forward difference, ``d_star`` its exact
adjoint for the cell-volume weighted inner product.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb, prod

import numpy as np

from src.config import settings
from src.errors import FluxError, LatticeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TorusLattice:
    sizes: tuple[int, ...]
    spacings: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        object.__setattr__(self, "spacings", tuple(float(h) for h in self.spacings))
        if len(self.sizes) not in (3, 4):
            raise LatticeError(f"lattice dimension must be 3 or 4, got {len(self.sizes)}")
        if len(self.spacings) != len(self.sizes):
            raise LatticeError("sizes and spacings must have the same length")
        if any(n < 4 for n in self.sizes):
            raise LatticeError(f"every size must be at least 4, got {self.sizes}")
        if any(not h > 0 for h in self.spacings):
            raise LatticeError(f"spacings must be positive, got {self.spacings}")
        if prod(self.sizes) > settings.MAX_SITES:
            raise LatticeError(
                f"{prod(self.sizes)} sites exceeds MONOPOLE_LAB_MAX_SITES={settings.MAX_SITES}"
            )

    @classmethod
    def cubic(cls, dim: int, n: int, h: float = 1.0) -> TorusLattice:
        return cls(sizes=(n,) * dim, spacings=(h,) * dim)

    @property
    def dim(self) -> int:
        return len(self.sizes)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.sizes

    @property
    def n_sites(self) -> int:
        return prod(self.sizes)

    @property
    def cell_volume(self) -> float:
        return float(prod(self.spacings))

    @property
    def lengths(self) -> tuple[float, ...]:
        return tuple(n * h for n, h in zip(self.sizes, self.spacings))

    @property
    def volume(self) -> float:
        return float(prod(self.lengths))

    def faces(self, k: int) -> list[tuple[int, ...]]:
        return _faces(self.dim, k)

    def zeros(self, k: int, complex_valued: bool = False) -> np.ndarray:
        dtype = complex if complex_valued else float
        return np.zeros((comb(self.dim, k),) + self.sizes, dtype=dtype)

    def index_grid(self, u: int) -> np.ndarray:
        """Integer coordinate n_u broadcast over the lattice."""
        shape = [1] * self.dim
        shape[u] = self.sizes[u]
        return np.arange(self.sizes[u]).reshape(shape)


@lru_cache(maxsize=None)
def _faces(dim: int, k: int) -> list[tuple[int, ...]]:
    return list(combinations(range(dim), k))


@lru_cache(maxsize=None)
def _coboundary_table(dim: int, k: int) -> list[tuple[int, int, int, int]]:
    """Rows (target index, source index, direction, sign) for d on k-cochains."""
    source = {face: i for i, face in enumerate(_faces(dim, k))}
    rows = []
    for j, target in enumerate(_faces(dim, k + 1)):
        for r, u in enumerate(target):
            rest = target[:r] + target[r + 1 :]
            rows.append((j, source[rest], u, -1 if r % 2 else 1))
    return rows


def _permutation_sign(order: tuple[int, ...]) -> int:
    sign = 1
    seq = list(order)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def _hodge_table(dim: int, k: int) -> list[tuple[int, int, int]]:
    """Rows (source index, target index, sign) with *e_I = sign e_J."""
    targets = {face: i for i, face in enumerate(_faces(dim, dim - k))}
    rows = []
    for i, face in enumerate(_faces(dim, k)):
        complement = tuple(u for u in range(dim) if u not in face)
        rows.append((i, targets[complement], _permutation_sign(face + complement)))
    return rows


@dataclass(frozen=True)
class Cochain:
    degree: int
    values: np.ndarray

    def check(self, lat: TorusLattice) -> None:
        expected = (comb(lat.dim, self.degree),) + lat.sizes
        if not 0 <= self.degree <= lat.dim or self.values.shape != expected:
            raise LatticeError(
                f"{self.degree}-cochain has shape {self.values.shape}, expected {expected}"
            )


def forward_difference(lat: TorusLattice, f: np.ndarray, u: int, axis_offset: int = 0) -> np.ndarray:
    axis = axis_offset + u
    return (np.roll(f, -1, axis=axis) - f) / lat.spacings[u]


def backward_difference(lat: TorusLattice, f: np.ndarray, u: int, axis_offset: int = 0) -> np.ndarray:
    axis = axis_offset + u
    return (f - np.roll(f, 1, axis=axis)) / lat.spacings[u]


def coboundary(lat: TorusLattice, values: np.ndarray, k: int) -> np.ndarray:
    """Array-level exterior derivative of a k-cochain."""
    out = np.zeros((comb(lat.dim, k + 1),) + lat.sizes, dtype=values.dtype)
    for j, i, u, sign in _coboundary_table(lat.dim, k):
        out[j] += sign * forward_difference(lat, values[i], u)
    return out


def coboundary_adjoint(lat: TorusLattice, values: np.ndarray, k: int) -> np.ndarray:
    """Array-level adjoint of ``coboundary`` taking (k+1)- to k-cochains."""
    out = np.zeros((comb(lat.dim, k),) + lat.sizes, dtype=values.dtype)
    for j, i, u, sign in _coboundary_table(lat.dim, k):
        out[i] -= sign * backward_difference(lat, values[j], u)
    return out


def hodge_values(lat: TorusLattice, values: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros((comb(lat.dim, lat.dim - k),) + lat.sizes, dtype=values.dtype)
    for i, j, sign in _hodge_table(lat.dim, k):
        out[j] = sign * values[i]
    return out


def selfdual_values(lat: TorusLattice, values: np.ndarray) -> np.ndarray:
    if lat.dim != 4:
        raise LatticeError("self-dual projection needs a 4-d lattice")
    return 0.5 * (values + hodge_values(lat, values, 2))


def d(lat: TorusLattice, c: Cochain) -> Cochain:
    c.check(lat)
    if c.degree == lat.dim:
        raise LatticeError(f"d of a top-degree cochain on a {lat.dim}-d lattice")
    return Cochain(c.degree + 1, coboundary(lat, c.values, c.degree))


def d_star(lat: TorusLattice, c: Cochain) -> Cochain:
    c.check(lat)
    if c.degree == 0:
        raise LatticeError("d_star of a 0-cochain")
    return Cochain(c.degree - 1, coboundary_adjoint(lat, c.values, c.degree - 1))


def hodge_star(lat: TorusLattice, c: Cochain) -> Cochain:
    c.check(lat)
    return Cochain(lat.dim - c.degree, hodge_values(lat, c.values, c.degree))


def selfdual_project(lat: TorusLattice, c: Cochain) -> Cochain:
    c.check(lat)
    if c.degree != 2:
        raise LatticeError("self-dual projection acts on 2-cochains")
    return Cochain(2, selfdual_values(lat, c.values))


def inner(lat: TorusLattice, x: np.ndarray, y: np.ndarray) -> float:
    """Cell-volume weighted real inner product Re sum x conj(y)."""
    if x.shape != y.shape:
        raise LatticeError(f"inner product of shapes {x.shape} and {y.shape}")
    return lat.cell_volume * float(np.sum((x * np.conj(y)).real))


def norm(lat: TorusLattice, x: np.ndarray) -> float:
    return float(np.sqrt(max(inner(lat, x, x), 0.0)))


@dataclass(frozen=True)
class FluxBackground:
    """Constant-curvature background with integer fluxes m_uv.

    ``phases`` are the link angles h_u A0_u, ``a0`` the connection coefficients,
    ``f0`` the constant curvature and ``dirac_string`` the integer 2-cochain
    with F0 * area = d(phases) + 2 pi * dirac_string on every plaquette.
    """

    m: np.ndarray
    phases: np.ndarray
    a0: np.ndarray
    f0: np.ndarray
    dirac_string: np.ndarray
    twists: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def spinor_compatible(self) -> bool:
        """Charge one-half sections exist only when every flux is even."""
        return bool(np.all(self.m % 2 == 0))

    @property
    def is_trivial(self) -> bool:
        return not np.any(self.m)


def _normalize_flux(lat: TorusLattice, m: np.ndarray | None) -> np.ndarray:
    dim = lat.dim
    if m is None:
        return np.zeros((dim, dim), dtype=int)
    m = np.asarray(m)
    if m.shape != (dim, dim):
        raise FluxError(f"flux matrix must be {dim}x{dim}, got {m.shape}")
    if not np.all(np.equal(np.mod(m, 1), 0)):
        raise FluxError("flux entries must be integers")
    m = m.astype(int)
    if np.any(m != -m.T):
        raise FluxError("flux matrix must be antisymmetric")
    if np.max(np.abs(m)) > settings.MAX_FLUX:
        raise FluxError(
            f"flux {int(np.max(np.abs(m)))} exceeds MONOPOLE_LAB_MAX_FLUX={settings.MAX_FLUX}"
        )
    return m


def flux_background(lat: TorusLattice, m: np.ndarray | None = None) -> FluxBackground:
    """Build the constant-curvature background with fluxes ``m``.

    For each plane (u, v) the angle on v-links grows linearly in n_u and the
    u-links crossing the seam n_u = N_u - 1 carry the compensating twist, so
    every plaquette holonomy is exp(2 pi i m / (N_u N_v)).
    """
    m = _normalize_flux(lat, m)
    dim = lat.dim
    phases = np.zeros((dim,) + lat.sizes)
    string = np.zeros((comb(dim, 2),) + lat.sizes, dtype=int)
    f0 = np.zeros((comb(dim, 2),) + lat.sizes)
    twists: dict[int, np.ndarray] = {}
    for p, (u, v) in enumerate(lat.faces(2)):
        muv = int(m[u, v])
        if muv == 0:
            continue
        nu, nv = lat.sizes[u], lat.sizes[v]
        phases[v] += 2 * np.pi * muv * lat.index_grid(u) / (nu * nv)
        seam = (lat.index_grid(u) == nu - 1) * lat.index_grid(v)
        phases[u] -= 2 * np.pi * muv * seam / nv
        corner = (lat.index_grid(u) == nu - 1) & (lat.index_grid(v) == nv - 1)
        string[p] += muv * corner
        f0[p] = 2 * np.pi * muv / (lat.lengths[u] * lat.lengths[v])
    for u in range(dim):
        twist = np.take(phases[u], lat.sizes[u] - 1, axis=u)
        if np.any(twist):
            twists[u] = twist
    a0 = np.stack([phases[u] / lat.spacings[u] for u in range(dim)])
    logger.debug("flux background m=%s spinor_compatible=%s", m.tolist(), bool(np.all(m % 2 == 0)))
    return FluxBackground(m=m, phases=phases, a0=a0, f0=f0, dirac_string=string, twists=twists)


def plaquette_flux(lat: TorusLattice, f2: np.ndarray) -> np.ndarray:
    """Total flux of a 2-cochain through each coordinate 2-torus at the origin.

    Returns an antisymmetric (d, d) matrix.
    """
    out = np.zeros((lat.dim, lat.dim))
    for p, (u, v) in enumerate(lat.faces(2)):
        index = tuple(slice(None) if w in (u, v) else 0 for w in range(lat.dim))
        total = float(np.sum(f2[p][index])) * lat.spacings[u] * lat.spacings[v]
        out[u, v], out[v, u] = total, -total
    return out


def chern_numbers(lat: TorusLattice, f2: np.ndarray) -> dict[str, np.ndarray]:
    """c1(L^2) and c1(L) = c1(L^2)/2 on each coordinate 2-torus."""
    flux = plaquette_flux(lat, f2)
    return {"c1_det": flux / (2 * np.pi), "c1": flux / (4 * np.pi)}
