"""Pydantic records: run configuration, reports, manifests and topology input."""

from __future__ import annotations

from itertools import combinations
from typing import Annotated, Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, BeforeValidator, Field, field_validator, model_validator

from src.config import settings


# --- Run configuration ---


def _split_list(value: Any) -> Any:
    """Accept "8,8,8,8" as well as a list, as written in run files and flags."""
    if isinstance(value, str):
        return [v for v in value.replace(" ", "").split(",") if v]
    if isinstance(value, (int, float)):
        return [value]
    return value


IntList = Annotated[list[int], BeforeValidator(_split_list)]
FloatList = Annotated[list[float], BeforeValidator(_split_list)]


class LatticeSection(BaseModel):
    """[lattice]: geometry and background flux."""

    size: IntList = Field(
        default_factory=lambda: [8, 8, 8, 8], description="Sites per direction; one entry means a 4-d cubic lattice"
    )
    spacing: FloatList = Field(
        default_factory=lambda: [1.0], description="Lattice spacing, one value or one per direction"
    )
    flux: IntList = Field(
        default_factory=list,
        description="Fluxes m01, m02, ... in pair order; empty means trivial",
    )

    @model_validator(mode="after")
    def _check_lengths(self) -> LatticeSection:
        if len(self.size) == 1:
            self.size = self.size * 4
        dim = len(self.size)
        if dim not in (3, 4):
            raise ValueError("size must have 3 or 4 entries")
        if any(n < 4 for n in self.size):
            raise ValueError(f"every size must be at least 4, got {self.size}")
        if len(self.spacing) == 1:
            self.spacing = self.spacing * dim
        if len(self.spacing) != dim:
            raise ValueError("spacing must have one entry or one per direction")
        pairs = dim * (dim - 1) // 2
        if self.flux and len(self.flux) != pairs:
            raise ValueError(f"flux needs {pairs} entries (one per plane), got {len(self.flux)}")
        return self

    @property
    def flux_matrix(self) -> list[list[int]]:
        dim = len(self.size)
        m = [[0] * dim for _ in range(dim)]
        for (u, v), flux in zip(combinations(range(dim), 2), self.flux):
            m[u][v], m[v][u] = flux, -flux
        return m


class FunctionalSection(BaseModel):
    """[functional]: which energy is minimized."""

    kappa: float = Field(default=0.0, description="Synthetic scalar-curvature constant")
    eta_amplitude: float = Field(
        default=0.0, description="Amplitude of the constant self-dual perturbation eta"
    )
    form: Literal["weitzenbock", "raw"] = Field(
        default="weitzenbock", description="Which form of the functional is evaluated"
    )


class SolverSection(BaseModel):
    """[solver]: descent controls."""

    tol: float = Field(
        default_factory=lambda: settings.GRAD_TOL,
        gt=0,
        description="RMS gradient per real degree of freedom (MONOPOLE_LAB_GRAD_TOL)",
    )
    max_iters: int = Field(
        default_factory=lambda: settings.MAX_ITERS, ge=0, description="Iteration cap (MONOPOLE_LAB_MAX_ITERS)"
    )
    gauge_fix_period: int = Field(
        default_factory=lambda: settings.GAUGE_FIX_PERIOD,
        ge=0,
        description="Coulomb fix every n iterations (MONOPOLE_LAB_GAUGE_FIX_PERIOD)",
    )
    step: Literal["bb", "fixed"] = Field(
        default="bb", description="Barzilai-Borwein steps or the fixed initial step"
    )


class RunSection(BaseModel):
    """[run]: seeds, threads and where outputs go."""

    seed: int = Field(default=0, description="Seed of the first random start")
    threads: int = Field(
        default_factory=lambda: settings.THREADS,
        ge=1,
        description="Worker threads (MONOPOLE_LAB_THREADS); 1 is bit-reproducible",
    )
    out: Optional[str] = Field(default=None, description="Output directory")
    amplitude: float = Field(default=0.5, ge=0, description="Amplitude of the random start")
    starts: int = Field(default=1, ge=1, description="Independent starts (seed, seed+1, ...)")


class RunConfig(BaseModel):
    """Resolved per-run configuration (run file merged with flags)."""

    lattice: LatticeSection = Field(default_factory=LatticeSection)
    functional: FunctionalSection = Field(default_factory=FunctionalSection)
    solver: SolverSection = Field(default_factory=SolverSection)
    run: RunSection = Field(default_factory=RunSection)


# --- Verification ---


class CheckResult(BaseModel):
    """Outcome of one verification check."""

    name: str = Field(description="Check identifier")
    passed: bool
    value: float = Field(description="Measured quantity (error, rate, ...)")
    threshold: Optional[float] = Field(default=None, description="Pass threshold")
    detail: str = Field(default="", description="Human readable context")


class SuiteReport(BaseModel):
    """All checks of one suite."""

    suite: str
    checks: list[CheckResult] = Field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


# --- Solve output ---


class IterationRecord(BaseModel):
    """One row of a solve trace."""

    iter: int
    action: float
    grad_norm: float
    psi_sup: float
    i_plus: float
    i_minus: float


class BoundsReport(BaseModel):
    """A priori bounds monitored at the end of a solve."""

    psi_sup2: float = Field(description="max |psi|^2")
    psi_bound: float = Field(description="max(0, -kappa)")
    i_plus: float = Field(description="Self-dual curvature energy")
    i_minus: float = Field(description="Anti-self-dual curvature energy")
    i_plus_bound: float = Field(description="kappa^2 Vol / 8")
    violations: list[str] = Field(default_factory=list)


class SolveReport(BaseModel):
    """Result of one gradient-flow run."""

    seed: int
    converged: bool
    iterations: int
    action: float
    grad_norm: float
    residual_dirac: float
    residual_curv: float
    energy: dict[str, float] = Field(default_factory=dict)
    bounds: Optional[BoundsReport] = None
    chern: list[list[float]] = Field(
        default_factory=list, description="c1(L) on each coordinate 2-torus"
    )
    gauge_fixes: int = 0
    message: str = ""


# --- Snapshots and manifests ---


class SnapshotHeader(BaseModel):
    """JSON header preceding the float64 payload of a field snapshot."""

    kind: Literal["a", "psi", "f", "cochain"]
    sizes: list[int]
    spacings: list[float]
    degree: int = Field(description="Cochain degree; 0 for spinors and gauge maps")
    components: int
    complex_valued: bool
    flux: list[list[int]] = Field(default_factory=list)
    seed: Optional[int] = None
    winding: list[int] = Field(default_factory=list)


class RunManifest(BaseModel):
    """Everything needed to reproduce a run."""

    command: str
    arguments: dict = Field(default_factory=dict, description="Flags as given")
    config: dict = Field(default_factory=dict, description="Fully resolved run configuration")
    config_file: Optional[str] = None
    seeds: list[int] = Field(default_factory=list)
    threads: int = 1
    code_version: str
    numpy_version: str
    scipy_version: str
    python_version: str
    started_at: str
    finished_at: Optional[str] = None
    wall_seconds: float = 0.0
    exit_code: Optional[int] = None
    outputs: list[str] = Field(default_factory=list)
    checks: dict[str, bool] = Field(default_factory=dict, description="Pass/fail per check")


# --- Topology ---


class FourManifoldData(BaseModel):
    """Closed oriented 4-manifold data: Betti numbers and intersection form."""

    name: str = ""
    b1: int = Field(ge=0)
    b2_plus: int = Field(ge=0)
    b2_minus: int = Field(ge=0)
    intersection_form: list[list[int]]
    euler: int
    signature: int

    @field_validator("intersection_form")
    @classmethod
    def _symmetric(cls, q: list[list[int]]) -> list[list[int]]:
        matrix = np.array(q, dtype=int).reshape(len(q), -1) if q else np.zeros((0, 0))
        if matrix.shape[0] != matrix.shape[1] or np.any(matrix != matrix.T):
            raise ValueError("intersection form must be a symmetric square matrix")
        return q

    @model_validator(mode="after")
    def _consistent(self) -> FourManifoldData:
        rank = len(self.intersection_form)
        if rank != self.b2_plus + self.b2_minus:
            raise ValueError(
                f"intersection form has rank {rank}, expected b2+ + b2- = "
                f"{self.b2_plus + self.b2_minus}"
            )
        if self.signature != self.b2_plus - self.b2_minus:
            raise ValueError("signature must equal b2+ - b2-")
        if rank:
            eigenvalues = np.linalg.eigvalsh(np.array(self.intersection_form, dtype=float))
            plus = int(np.sum(eigenvalues > 1e-9))
            minus = int(np.sum(eigenvalues < -1e-9))
            if (plus, minus) != (self.b2_plus, self.b2_minus):
                raise ValueError(
                    f"intersection form has inertia ({plus}, {minus}), "
                    f"expected ({self.b2_plus}, {self.b2_minus})"
                )
        if self.euler != 2 - 2 * self.b1 + rank:
            raise ValueError("euler characteristic must equal 2 - 2 b1 + b2")
        return self

    @property
    def form(self) -> np.ndarray:
        return np.array(self.intersection_form, dtype=int).reshape(
            len(self.intersection_form), len(self.intersection_form)
        )

    @property
    def characteristic_number(self) -> int:
        """2 chi + 3 sigma."""
        return 2 * self.euler + 3 * self.signature


class SpinCClass(BaseModel):
    """A Spin^c structure recorded by c1(L^2) in the intersection lattice basis."""

    c1: list[int]


class TopologyRow(BaseModel):
    """Per-class output of the topology command."""

    c1: list[int]
    c1_squared: str
    dimension: str
    dirac_index: str
    asd_index: str
    characteristic: bool
    count_rule: str
    vanishing_reason: str = ""


class TopologyReport(BaseModel):
    manifold: str
    rows: list[TopologyRow] = Field(default_factory=list)
    basic_classes: list[list[int]] = Field(default_factory=list)
    genus_table: list[tuple[int, int]] = Field(
        default_factory=list, description="(degree, minimal genus) rows"
    )
    curvature_bounds: list[tuple[int, float, float]] = Field(
        default_factory=list, description="(genus, |F| bound, |psi|^2 bound) rows"
    )
    connected_sum: Optional[str] = None
    notes: list[str] = Field(default_factory=list)


class TopologyQuery(BaseModel):
    """Input of the topology command: a manifold plus what to tabulate.

    A bare ``FourManifoldData`` object is accepted as well.
    """

    manifold: FourManifoldData
    classes: list[list[int]] = Field(default_factory=list, description="c1(L^2) values to tabulate")
    bound: Optional[int] = Field(default=None, ge=0, description="Box bound of the basic-class search")
    characteristic_only: bool = Field(default=False, description="Keep characteristic classes only")
    thom_degrees: list[int] = Field(default_factory=list, description="Degrees for the genus table")
    genera: list[int] = Field(default_factory=list, description="Genera for the curvature estimate")
    connected_sum: Optional[tuple[int, int]] = Field(
        default=None, description="(b2+, b2+) of two summands"
    )

    @model_validator(mode="before")
    @classmethod
    def _bare_manifold(cls, data: Any) -> Any:
        if isinstance(data, dict) and "manifold" not in data:
            return {"manifold": data}
        return data
