from __future__ import annotations

import numpy as np
import pytest

from src.descent import DescentOptions, SteepestDescent
from src.errors import SolverError


class Quadratic:
    """0.5 x.Ax - b.x on plain vectors."""

    def __init__(self, a: np.ndarray, b: np.ndarray, sign: float = 1.0) -> None:
        self.a, self.b, self.sign = a, b, sign

    def objective(self, x: np.ndarray) -> float:
        return float(0.5 * x @ self.a @ x - self.b @ x)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.sign * (self.a @ x - self.b)

    def retract(self, x: np.ndarray, v: np.ndarray, t: float) -> np.ndarray:
        return x + t * v

    def dot(self, x: np.ndarray, v: np.ndarray, w: np.ndarray) -> float:
        return float(v @ w)

    def difference(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return x - y

    def grad_rms(self, g: np.ndarray) -> float:
        return float(np.sqrt(np.mean(g**2)))


@pytest.fixture
def problem():
    rng = np.random.default_rng(3)
    q = rng.normal(size=(8, 8))
    a = q @ q.T + 8 * np.eye(8)
    return Quadratic(a, rng.normal(size=8))


@pytest.mark.parametrize("bb_steps", [True, False])
def test_converges_to_the_minimizer(problem, bb_steps):
    opts = DescentOptions(tol=1e-10, max_iters=20_000, initial_step=0.01, bb_steps=bb_steps)
    result = SteepestDescent(problem, opts).minimize(np.zeros(8))
    assert result.converged
    assert np.allclose(result.x, np.linalg.solve(problem.a, problem.b), atol=1e-8)
    assert len(result.history) == result.iterations + 1
    assert np.all(np.diff(result.history) <= opts.roundoff * max(1.0, abs(result.value)))


def test_barzilai_borwein_needs_fewer_iterations(problem):
    runs = {
        bb: SteepestDescent(problem, DescentOptions(tol=1e-10, max_iters=20_000, bb_steps=bb)).minimize(np.zeros(8))
        for bb in (True, False)
    }
    assert runs[True].iterations < runs[False].iterations


def test_callback_and_projection(problem):
    seen = []
    projected = []

    def project(x: np.ndarray) -> np.ndarray:
        projected.append(x)
        return x

    opts = DescentOptions(tol=0.0, max_iters=12, project_every=5)
    result = SteepestDescent(problem, opts, project=project, callback=seen.append).minimize(np.zeros(8))
    assert not result.converged
    assert result.iterations == 12
    assert result.projections == len(projected) == 2
    assert [s.iteration for s in seen] == list(range(13))


def test_ascent_direction_fails_the_line_search():
    problem = Quadratic(np.eye(3), np.zeros(3), sign=-1.0)
    x0 = np.ones(3)
    with pytest.raises(SolverError) as info:
        SteepestDescent(problem, DescentOptions(tol=1e-12)).minimize(x0)
    assert np.array_equal(info.value.last, x0)


def test_keeps_converging_once_the_objective_is_flat_to_round_off(problem):
    """Gradients far below sqrt(eps) still shrink with BB steps."""
    x_star = np.linalg.solve(problem.a, problem.b)
    opts = DescentOptions(tol=1e-12, max_iters=2_000, bb_steps=True)
    result = SteepestDescent(problem, opts).minimize(x_star + 1e-7)
    assert result.converged
    assert result.iterations < 2_000
    assert np.allclose(result.x, x_star, atol=1e-12)
