"""Newton-type corrections and the frozen-matrix fixed-point iteration.

These are the two primitive iteration moves: one damped-Newton correction
delta = -M(x)^{-1} f(x), and the simplified sweep u <- u - M(x_n)^{-1} f(u)
that reuses a single frozen factorization.  Both are stateless given
their inputs and safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GuardViolation, NonFiniteValue
from .linalg import LinearSolveHandle, enorm


@dataclass
class Counters:
    """Evaluation bookkeeping threaded through the solver."""

    f_evals: int = 0
    j_evals: int = 0
    factorizations: int = 0

    def snapshot(self) -> "Counters":
        return Counters(self.f_evals, self.j_evals, self.factorizations)


@dataclass(frozen=True)
class Correction:
    """A Newton-type correction delta = -M(x)^{-1} f(x) and its norm."""

    delta: np.ndarray
    alpha: float


@dataclass
class SimplifiedRunResult:
    point: np.ndarray
    iterations: int
    converged: bool
    residual_history: list = field(default_factory=list)


def correction(problem, x, handle: LinearSolveHandle,
               counters: Counters | None = None) -> Correction:
    """Compute delta solving M delta = -f(x) through the given factorization."""
    fx = problem.eval_f(x)
    if counters is not None:
        counters.f_evals += 1
    if not np.all(np.isfinite(fx)):
        raise NonFiniteValue(f"f({np.asarray(x)}) is not finite")
    delta = handle.solve(-fx)
    return Correction(delta=delta, alpha=enorm(delta))


def simplified_iterate(problem, x_n, frozen: LinearSolveHandle, eps: float,
                       max_sweeps: int = 200, guard_radius: float = np.inf,
                       counters: Counters | None = None) -> SimplifiedRunResult:
    """Frozen-matrix fixed-point iteration u <- u - M(x_n)^{-1} f(u) from x_n.

    Sweeps until the correction norm drops to ``eps`` (the final sub-eps
    correction is still applied), the sweep budget is exhausted
    (``converged=False``), or an iterate leaves the ball of radius
    ``guard_radius`` around ``x_n`` -- which raises :class:`GuardViolation`
    carrying the partial result, since a valid certificate forbids it.

    ``iterations`` counts the sweeps whose correction exceeded ``eps``;
    ``residual_history`` holds exactly those correction norms.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if guard_radius <= 0:
        raise ValueError("guard_radius must be positive")
    x_n = np.asarray(x_n, dtype=float)
    u = x_n.copy()
    history: list[float] = []
    while True:
        fu = problem.eval_f(u)
        if counters is not None:
            counters.f_evals += 1
        if not np.all(np.isfinite(fu)):
            raise NonFiniteValue(f"f({u}) is not finite during simplified iteration")
        d = frozen.solve(-fu)
        a = enorm(d)
        if a <= eps:
            u = u + d
            return SimplifiedRunResult(point=u, iterations=len(history),
                                       converged=True, residual_history=history)
        if len(history) >= max_sweeps:
            return SimplifiedRunResult(point=u, iterations=len(history),
                                       converged=False, residual_history=history)
        u = u + d
        history.append(a)
        if enorm(u - x_n) > guard_radius:
            raise GuardViolation(SimplifiedRunResult(
                point=u, iterations=len(history), converged=False,
                residual_history=history))
