"""Globalized solve loop: adaptive damped phase, certificate monitoring,
certified switch to the frozen-matrix phase.

Four modes:

  AS    adaptive step sizes, switch enabled
  ANS   adaptive step sizes, no switch
  NANS  full steps (tau = inf), no switch -- the classical Newton scheme
  NAS   full steps, switch enabled

The loop structure (correction; step; two-point Lipschitz estimate;
verdict; either frozen-phase finish or adaptive update) matches the
compiled grid kernel in :mod:`._fastscan` operation for operation, so a
traced solve and a fast scan of the same start point agree exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .certificate import SwitchCertificate, build_certificate, estimate_omega_hat
from .errors import DegenerateStep, GuardViolation, NonFiniteValue, StepCollapse
from .kernel import Correction, Counters, simplified_iterate
from .linalg import enorm, factorize
from .problems import Problem
from .stepcontrol import StepControllerConfig, propose_step

MODES = ("AS", "ANS", "NANS", "NAS")

# outcome labels, aligned with the kernel's integer codes
OUTCOMES = ("Converged", "MaxIterations", "SingularAbort", "NonFinite", "StepCollapse")

DIVERGENCE_BOUND = 1e8


@dataclass(frozen=True)
class SolverConfig:
    mode: str = "AS"
    eps: float = 1e-10
    max_outer: int = 500
    step: StepControllerConfig = field(default_factory=StepControllerConfig)
    simplified_eps: Optional[float] = None  # defaults to eps
    max_sweeps: int = 200
    strict_algorithm1: bool = False  # disable resume after a guard violation

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.eps <= 0:
            raise ValueError("eps must be positive")

    @property
    def adaptive(self) -> bool:
        return self.mode in ("AS", "ANS")

    @property
    def switching(self) -> bool:
        return self.mode in ("AS", "NAS")

    @property
    def effective_tau(self) -> float:
        return self.step.tau if self.adaptive else math.inf


@dataclass
class SolveTrace:
    outcome: str
    zero: Optional[np.ndarray]
    outer_iterations: int
    simplified_sweeps: int
    switched_at: Optional[int]
    certificates: list
    f_evals: int
    j_evals: int
    factorizations: int
    # counter snapshot taken right after the frozen factorization, for the
    # frozen-Jacobian economy check
    j_evals_at_switch: Optional[int] = None
    factorizations_at_switch: Optional[int] = None
    step_sizes: list = field(default_factory=list)
    # anchor of the frozen phase (the point whose Jacobian was frozen)
    switch_point: Optional[np.ndarray] = None

    @property
    def converged(self) -> bool:
        return self.outcome == "Converged"

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "zero": None if self.zero is None else [float(c) for c in self.zero],
            "outer_iterations": self.outer_iterations,
            "simplified_sweeps": self.simplified_sweeps,
            "switched_at": self.switched_at,
            "certificates": [c.to_dict() for c in self.certificates],
            "f_evals": self.f_evals,
            "j_evals": self.j_evals,
            "factorizations": self.factorizations,
            "step_sizes": self.step_sizes,
            "switch_point": None if self.switch_point is None
            else [float(c) for c in self.switch_point],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


@dataclass
class ResumeState:
    """Cooldown bookkeeping after guard violations.

    Each violation suppresses the switch verdict for ``cooldown_len``
    outer iterations and doubles the suppression window, so a marginal
    certificate cannot thrash between phases.
    """

    cooldown: int = 0
    cooldown_len: int = 3


def resume_policy(state: ResumeState, violation: GuardViolation) -> np.ndarray:
    """Re-enter the adaptive phase from the violating iterate."""
    state.cooldown = state.cooldown_len
    state.cooldown_len *= 2
    return np.asarray(violation.result.point, dtype=float)


def solve(problem: Problem, x0, cfg: SolverConfig | None = None) -> SolveTrace:
    """Run the adaptive simplified-Newton-like method from x0.

    Never raises for numerical trouble: every failure is encoded in the
    trace's ``outcome``.
    """
    if cfg is None:
        cfg = SolverConfig()
    counters = Counters()
    certificates: list[SwitchCertificate] = []
    step_sizes: list[float] = []
    tau = cfg.effective_tau
    step_cfg = StepControllerConfig(tau=tau, t_lower=cfg.step.t_lower,
                                    growth=cfg.step.growth, shrink=cfg.step.shrink)
    simpl_eps = cfg.eps if cfg.simplified_eps is None else cfg.simplified_eps
    resume_state = ResumeState()

    def finish(outcome, zero, outer, sweeps, switched_at, at_switch=None,
               switch_point=None):
        return SolveTrace(
            outcome=outcome,
            zero=None if zero is None else np.asarray(zero, dtype=float),
            outer_iterations=outer,
            simplified_sweeps=sweeps,
            switched_at=switched_at,
            certificates=certificates,
            f_evals=counters.f_evals,
            j_evals=counters.j_evals,
            factorizations=counters.factorizations,
            j_evals_at_switch=None if at_switch is None else at_switch.j_evals,
            factorizations_at_switch=None if at_switch is None else at_switch.factorizations,
            step_sizes=step_sizes,
            switch_point=None if switch_point is None
            else np.asarray(switch_point, dtype=float),
        )

    x = np.asarray(x0, dtype=float)
    try:
        fx = problem.eval_f(x)
    except Exception:
        return finish("NonFinite", None, 0, 0, None)
    counters.f_evals += 1
    if not np.all(np.isfinite(fx)):
        return finish("NonFinite", None, 0, 0, None)
    jx = problem.eval_jacobian(x)
    counters.j_evals += 1
    handle = factorize(jx)
    counters.factorizations += 1
    if handle.singular:
        return finish("SingularAbort", None, 0, 0, None)
    delta = handle.solve(-fx)
    alpha = enorm(delta)
    prev_t = 1.0
    x_s, j_s, handle_s = x, jx, handle
    sweeps_total = 0
    switched_at: Optional[int] = None
    at_switch: Optional[Counters] = None

    for k in range(1, cfg.max_outer + 1):
        resumed_now = False
        if alpha <= cfg.eps:
            return finish("Converged", x, k - 1, sweeps_total, switched_at, at_switch)

        # step size; tau=inf collapses to t=1
        try:
            decision = propose_step(problem, x, fx, Correction(delta, alpha),
                                    prev_t, step_cfg, counters=counters)
        except StepCollapse:
            return finish("StepCollapse", None, k, sweeps_total, switched_at, at_switch)
        t = decision.t
        step_sizes.append(t)

        x_new = x + t * delta
        if not np.all(np.isfinite(x_new)) or enorm(x_new) > DIVERGENCE_BOUND:
            return finish("NonFinite", None, k, sweeps_total, switched_at, at_switch)
        f_new = problem.eval_f(x_new)
        counters.f_evals += 1
        if not np.all(np.isfinite(f_new)):
            return finish("NonFinite", None, k, sweeps_total, switched_at, at_switch)
        j_new = problem.eval_jacobian(x_new)
        counters.j_evals += 1

        # two-point Lipschitz estimate over the latest segment
        try:
            omega_hat = estimate_omega_hat(handle_s, j_new, j_s, x_new, x_s)
        except DegenerateStep:
            omega_hat = math.inf
        cert = build_certificate(alpha, omega_hat, kappa=0.0)
        certificates.append(cert)

        handle_new = factorize(j_new)
        counters.factorizations += 1
        if handle_new.singular:
            return finish("SingularAbort", None, k, sweeps_total, switched_at, at_switch)

        if cfg.switching and resume_state.cooldown == 0 and cert.verdict:
            switched_at = k - 1  # index of the licensing certificate
            at_switch = counters.snapshot()
            anchor = x_new.copy()
            guard = cert.radius_R
            try:
                run = simplified_iterate(problem, x_new, handle_new, simpl_eps,
                                         max_sweeps=cfg.max_sweeps,
                                         guard_radius=guard, counters=counters)
            except NonFiniteValue:
                return finish("NonFinite", None, k, sweeps_total, switched_at,
                              at_switch, anchor)
            except GuardViolation as violation:
                sweeps_total += violation.result.iterations
                if cfg.strict_algorithm1:
                    return finish("MaxIterations", None, k, sweeps_total,
                                  switched_at, at_switch, anchor)
                switched_at = None
                at_switch = None
                resumed_now = True
                x_new = resume_policy(resume_state, violation)
                if enorm(x_new) > DIVERGENCE_BOUND:
                    return finish("NonFinite", None, k, sweeps_total, None)
                f_new = problem.eval_f(x_new)
                counters.f_evals += 1
                if not np.all(np.isfinite(f_new)):
                    return finish("NonFinite", None, k, sweeps_total, None)
                j_new = problem.eval_jacobian(x_new)
                counters.j_evals += 1
                handle_new = factorize(j_new)
                counters.factorizations += 1
                if handle_new.singular:
                    return finish("SingularAbort", None, k, sweeps_total, None)
            else:
                sweeps_total += run.iterations
                if run.converged:
                    return finish("Converged", run.point, k, sweeps_total,
                                  switched_at, at_switch, anchor)
                return finish("MaxIterations", None, k, sweeps_total,
                              switched_at, at_switch, anchor)

        # adaptive update
        x = x_new
        fx = f_new
        delta = handle_new.solve(-f_new)
        alpha = enorm(delta)
        x_s, j_s, handle_s = x, j_new, handle_new
        prev_t = t
        if resume_state.cooldown > 0 and not resumed_now:
            resume_state.cooldown -= 1

    return finish("MaxIterations", None, cfg.max_outer, sweeps_total,
                  switched_at, at_switch)
