"""Steepest descent with Barzilai-Borwein step lengths and Armijo backtracking.

The driver is generic over the point type: a ``DescentProblem`` supplies the
objective, its gradient, the retraction x + t v and an inner product. Steps
must pass the Armijo test; once the predicted decrease falls below the
round-off of the objective, a step is accepted when it lowers the gradient
norm and raises the objective by no more than that round-off.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Generic, Protocol, TypeVar

import numpy as np

from src.errors import SolverError

logger = logging.getLogger(__name__)

P = TypeVar("P")
V = TypeVar("V")


class DescentProblem(Protocol[P, V]):
    def objective(self, x: P) -> float: ...

    def gradient(self, x: P) -> V: ...

    def retract(self, x: P, v: V, t: float) -> P: ...

    def dot(self, x: P, v: V, w: V) -> float: ...

    def difference(self, x: P, y: P) -> V: ...

    def grad_rms(self, g: V) -> float: ...


@dataclass
class DescentOptions:
    tol: float = 1e-8
    max_iters: int = 5000
    initial_step: float = 1e-2
    min_step: float = 1e-14
    max_step: float = 1e3
    armijo: float = 1e-4
    backtrack: float = 0.5
    bb_steps: bool = True
    project_every: int = 0
    require_decrease: bool = True
    roundoff: float = 1e3 * float(np.finfo(float).eps)


@dataclass
class DescentState(Generic[P, V]):
    x: P
    value: float
    grad: V
    grad_rms: float
    iteration: int = 0
    step: float = 0.0


@dataclass
class DescentResult(Generic[P]):
    x: P
    value: float
    grad_rms: float
    iterations: int
    converged: bool
    projections: int = 0
    history: list[float] = field(default_factory=list)


class SteepestDescent(Generic[P, V]):
    """Gradient descent with alternating BB1/BB2 steps."""

    def __init__(
        self,
        problem: DescentProblem[P, V],
        options: DescentOptions | None = None,
        project: Callable[[P], P] | None = None,
        callback: Callable[[DescentState[P, V]], None] | None = None,
    ) -> None:
        self.problem = problem
        self.options = options or DescentOptions()
        self.project = project
        self.callback = callback

    def _bb_step(self, x: P, prev_x: P, g: V, prev_g: V, iteration: int) -> float:
        opts = self.options
        s = self.problem.difference(x, prev_x)
        y = g - prev_g
        sy = self.problem.dot(x, s, y)
        if iteration % 2 == 0:
            tau = self.problem.dot(x, s, s) / sy if sy else np.nan
        else:
            yy = self.problem.dot(x, y, y)
            tau = sy / yy if yy else np.nan
        tau = abs(tau)
        if np.isnan(tau) or tau < opts.min_step:
            return opts.initial_step
        return min(tau, opts.max_step)

    def _state(self, x: P, iteration: int, step: float) -> DescentState[P, V]:
        g = self.problem.gradient(x)
        return DescentState(
            x=x,
            value=self.problem.objective(x),
            grad=g,
            grad_rms=self.problem.grad_rms(g),
            iteration=iteration,
            step=step,
        )

    def minimize(self, x0: P) -> DescentResult[P]:
        opts = self.options
        state = self._state(x0, 0, 0.0)
        history = [state.value]
        projections = 0
        prev: DescentState[P, V] | None = None
        if self.callback:
            self.callback(state)

        while state.grad_rms > opts.tol and state.iteration < opts.max_iters:
            if prev is not None and opts.bb_steps:
                t = self._bb_step(state.x, prev.x, state.grad, prev.grad, state.iteration)
            else:
                t = opts.initial_step
            slope = self.problem.dot(state.x, state.grad, state.grad)
            floor = opts.roundoff * max(1.0, abs(state.value))
            trial: DescentState[P, V] | None = None
            while True:
                candidate = self.problem.retract(state.x, state.grad, -t)
                value = self.problem.objective(candidate)
                if not opts.require_decrease or value <= state.value - opts.armijo * t * slope:
                    break
                # objective differences are round-off: require a smaller gradient instead
                if t * slope <= floor and value <= state.value + floor:
                    trial = self._state(candidate, state.iteration + 1, t)
                    if trial.grad_rms < state.grad_rms:
                        break
                    trial = None
                t *= opts.backtrack
                if t < opts.min_step:
                    raise SolverError(
                        f"line search failed at iteration {state.iteration} "
                        f"(value {state.value:.6e}, grad rms {state.grad_rms:.3e})",
                        last=state.x,
                    )
            prev = state
            iteration = state.iteration + 1
            if self.project and opts.project_every and iteration % opts.project_every == 0:
                candidate = self.project(candidate)
                projections += 1
                prev = None
            if trial is None or candidate is not trial.x:
                trial = self._state(candidate, iteration, t)
            state = trial
            history.append(state.value)
            if self.callback:
                self.callback(state)

        converged = state.grad_rms <= opts.tol
        logger.info(
            "descent finished: %d iterations, value %.8e, grad rms %.3e, converged=%s",
            state.iteration,
            state.value,
            state.grad_rms,
            converged,
        )
        return DescentResult(
            x=state.x,
            value=state.value,
            grad_rms=state.grad_rms,
            iterations=state.iteration,
            converged=converged,
            projections=projections,
            history=history,
        )
