"""Adaptive step-size control for the globalized phase.

The accepted step t in (0, 1] keeps the damped iterate x + t*delta close
to the local Newton path x(s), defined by f(x(s)) = (1 - s) f(x), whose
tangent field freezes the current residual:

    Ftilde(y) = -J_f(y)^{-1} f(x),      Ftilde(x) = delta.

The deviation estimate is the second-order gap between the straight step
and that path,

    deviation(t) = 0.5 * t * |Ftilde(x + t*delta) - delta|,

computable with one extra Jacobian factorization per trial and exactly
zero for affine f (the straight step *is* the path then).  A trial step
that lands on a singular matrix counts as a failed deviation bound, so
singular points repel the path.  With tau = +inf the controller always
returns t = 1, which reproduces the undamped classical scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainViolation, StepCollapse
from .kernel import Correction, Counters
from .linalg import enorm, factorize


@dataclass(frozen=True)
class StepControllerConfig:
    tau: float = 0.01          # path-tracking tolerance; +inf disables control
    # the floor must sit far below 1: forcing sizable steps where the bound
    # fails (near-singular Jacobians) teleports iterates across basins
    t_lower: float = 1e-8
    growth: float = 2.0        # predictor expansion per accepted step
    shrink: float = 0.5        # corrector contraction per rejected trial

    def __post_init__(self):
        if not (0.0 < self.t_lower < 1.0):
            raise ValueError("t_lower must lie in (0, 1)")
        if self.growth <= 1.0:
            raise ValueError("growth must exceed 1")
        if not (0.0 < self.shrink < 1.0):
            raise ValueError("shrink must lie in (0, 1)")
        if self.tau <= 0.0:
            raise ValueError("tau must be positive (use +inf to disable)")


@dataclass(frozen=True)
class StepDecision:
    t: float
    deviation_estimate: float
    corrector_rounds: int
    forced: bool = False  # True when t_lower was imposed despite a failing bound


def _path_field(problem, y, f_cur, counters: Counters | None):
    """Ftilde(y) = -J_f(y)^{-1} f(x), or None when the trial point is unusable."""
    try:
        jy = problem.eval_jacobian(y)
    except DomainViolation:
        return None
    if counters is not None:
        counters.j_evals += 1
    if not np.all(np.isfinite(jy)):
        return None
    handle = factorize(jy)
    if counters is not None:
        counters.factorizations += 1
    if handle.singular:
        return None
    return handle.solve(-f_cur)


def propose_step(problem, x, f_x, corr: Correction, prev_t: float,
                 cfg: StepControllerConfig, counters: Counters | None = None,
                 strict: bool = False) -> StepDecision:
    """Largest tested step t = min(1, growth*prev_t) * shrink^k meeting the bound.

    Never returns t below ``t_lower``; when even ``t_lower`` violates the
    bound the decision is marked ``forced`` (or, with ``strict=True``,
    :class:`StepCollapse` is raised -- the iteration should then be
    classified as not convergent).
    """
    if cfg.tau == math.inf:
        return StepDecision(t=1.0, deviation_estimate=0.0, corrector_rounds=0)
    x = np.asarray(x, dtype=float)
    f_x = np.asarray(f_x, dtype=float)
    delta = corr.delta
    t = cfg.growth * prev_t
    if t > 1.0:
        t = 1.0
    rounds = 0
    while True:
        field = _path_field(problem, x + t * delta, f_x, counters)
        if field is None:
            dev = math.inf
        else:
            dev = 0.5 * t * enorm(field - delta)
        if dev <= cfg.tau:
            return StepDecision(t=t, deviation_estimate=dev, corrector_rounds=rounds)
        if t <= cfg.t_lower:
            if strict:
                raise StepCollapse(f"deviation {dev:.3g} > tau {cfg.tau:.3g} at t_lower")
            return StepDecision(t=cfg.t_lower, deviation_estimate=dev,
                                corrector_rounds=rounds, forced=True)
        t = t * cfg.shrink
        if t < cfg.t_lower:
            t = cfg.t_lower
        rounds += 1
