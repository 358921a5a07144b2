"""Computable switch certificates for the frozen-matrix phase.

The switch to the simplified iteration is licensed by the inequality

    alpha * omega_hat <= (1 - kappa)^2 / 2

where alpha is the norm of the current correction, omega_hat a two-point
estimate of the affine-covariant Lipschitz constant of the transformed
Jacobian, and kappa an operator-norm estimate of Id - M^{-1} J_f.  When
the inequality holds, the quadratic

    omega/2 * rho^2 - (1 - kappa) * rho + alpha = 0

has real roots r <= R; the fixed-point map g(v) = v - M(x_n)^{-1} f(v)
maps the ball of radius R (and of radius r) around x_n into itself and
contracts near x_n, so a unique zero exists in reach of the frozen
iteration.  omega_hat is a single-pair estimate, not a supremum, which is
why :func:`verify_certificate_sampled` exists: it falsifies bad estimates
by sampling the self-map and contraction inequalities directly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateStep, EstimateOverflowWarning
from .linalg import LinearSolveHandle, enorm, matvec, sumsq
from .problems import MatrixPolicy, Problem

DEGENERATE_RTOL = 1e-14


@dataclass(frozen=True)
class SwitchCertificate:
    omega_hat: float
    kappa: float
    alpha: float
    radius_R: Optional[float]  # large quadratic root (self-map ball / guard)
    radius_r: Optional[float]  # small quadratic root (certified inner ball)
    verdict: bool

    def to_dict(self) -> dict:
        return {
            "omega_hat": self.omega_hat,
            "kappa": self.kappa,
            "alpha": self.alpha,
            "R": self.radius_R,
            "r": self.radius_r,
            "verdict": self.verdict,
        }


def verdict(alpha: float, omega_hat: float, kappa: float) -> bool:
    """True iff alpha * omega_hat <= (1 - kappa)^2 / 2 (non-strict)."""
    if kappa >= 1.0:
        return False
    return alpha * omega_hat <= 0.5 * (1.0 - kappa) * (1.0 - kappa)


def radii(kappa: float, omega: float, alpha: float):
    """Both roots (R, r) of the certificate quadratic, or (None, None).

    Presence is keyed on :func:`verdict` so the two can never disagree at
    the boundary.  The small root is computed as (2 alpha / omega) / R,
    which stays accurate when alpha is tiny.  omega == 0 (affine residual)
    degenerates to R = inf, r = alpha / (1 - kappa).
    """
    if omega < 0.0:
        raise ValueError("omega must be nonnegative")
    if alpha < 0.0:
        raise ValueError("alpha must be nonnegative")
    if not verdict(alpha, omega, kappa):
        return (None, None)
    if omega == 0.0:
        return (math.inf, alpha / (1.0 - kappa))
    base = (1.0 - kappa) / omega
    disc = base * base - 2.0 * alpha / omega
    if disc < 0.0:
        disc = 0.0
    big = base + math.sqrt(disc)
    if big == 0.0:
        return (0.0, 0.0)
    # the quotient can land one ulp above big at the boundary; r <= R holds
    # mathematically, so keep it true in floating point too
    small = (2.0 * alpha / omega) / big
    return (big, small if small <= big else big)


def build_certificate(alpha: float, omega_hat: float, kappa: float = 0.0) -> SwitchCertificate:
    ok = verdict(alpha, omega_hat, kappa)
    big, small = radii(kappa, omega_hat, alpha) if ok else (None, None)
    return SwitchCertificate(omega_hat=omega_hat, kappa=kappa, alpha=alpha,
                             radius_R=big, radius_r=small, verdict=ok)


def estimate_omega_hat(handle_at_xn: LinearSolveHandle, j_next: np.ndarray,
                       j_n: np.ndarray, x_next, x_n) -> float:
    """Two-point Lipschitz quotient |M(x_n)^{-1} (J(x_next)-J(x_n)) s| / |s|^2.

    ``s = x_next - x_n``; raises :class:`DegenerateStep` when the step is
    too short to divide by.
    """
    x_next = np.asarray(x_next, dtype=float)
    x_n = np.asarray(x_n, dtype=float)
    s = x_next - x_n
    den = sumsq(s)
    snrm = math.sqrt(den)
    mx = enorm(x_n)
    if mx < 1.0:
        mx = 1.0
    if snrm <= DEGENERATE_RTOL * mx:
        raise DegenerateStep(f"|x_next - x_n| = {snrm:.3g} is below threshold")
    w = matvec(np.asarray(j_next, dtype=float) - np.asarray(j_n, dtype=float), s)
    v = handle_at_xn.solve(w)
    return enorm(v) / den


def estimate_kappa(policy: MatrixPolicy, handle: LinearSolveHandle,
                   j_at_x: np.ndarray) -> float:
    """Operator-norm (1-norm) estimate of Id - M^{-1} J_f(x).

    For the current-Jacobian policy this is identically zero at the
    evaluation point, with no computation and no rounding.  A result >= 1
    violates the approximation assumption; it is returned as-is with an
    :class:`EstimateOverflowWarning` so the verdict can fail gracefully.
    """
    if policy.kind == "current":
        return 0.0
    n = handle.n
    defect = np.eye(n) - handle.solve(np.asarray(j_at_x, dtype=float))
    est = float(np.abs(defect).sum(axis=0).max())
    if est >= 1.0:
        warnings.warn(
            f"matrix-approximation defect estimate {est:.3g} >= 1",
            EstimateOverflowWarning, stacklevel=2)
    return est


@dataclass(frozen=True)
class CertificateCheckReport:
    samples: int
    selfmap_violations: int
    contraction_violations: int

    @property
    def violations(self) -> int:
        return self.selfmap_violations + self.contraction_violations


def _sample_in_ball(rng, center: np.ndarray, radius: float) -> np.ndarray:
    n = center.shape[0]
    u = rng.standard_normal(n)
    nrm = enorm(u)
    if nrm == 0.0:
        return center.copy()
    rad = radius * rng.random() ** (1.0 / n)
    return center + (rad / nrm) * u

def verify_certificate_sampled(problem: Problem, x_n, cert: SwitchCertificate,
                               handle: LinearSolveHandle, samples: int,
                               seed: int) -> CertificateCheckReport:
    """Sampled falsification of a certificate's self-map/contraction claims.

    Draws pairs (x, y) uniformly from the certified inner ball (radius
    ``radius_r`` -- the ball on which the local kappa estimate is
    trustworthy) and counts violations of

      (a)  |g(x) - x_n| <= radius_r                      (self-map)
      (b)  |g(x) - g(y)| <= (kappa + omega_hat*R/2) * |x - y| * (1 + 1e-9)

    with g(v) = v - M(x_n)^{-1} f(v) solved through ``handle``.
    Violations are data, not errors: they falsify the omega/kappa
    estimates, not the code.
    """
    if cert.radius_R is None:
        raise ValueError("certificate carries no radii (verdict is false)")
    x_n = np.asarray(x_n, dtype=float)
    rng = np.random.default_rng(seed)
    rho = cert.radius_r
    factor = (cert.kappa + 0.5 * cert.omega_hat * cert.radius_R) * (1.0 + 1e-9)
    self_bad = 0
    contract_bad = 0

    def g(v):
        return v - handle.solve(problem.eval_f(v))

    for _ in range(samples):
        xa = _sample_in_ball(rng, x_n, rho)
        ya = _sample_in_ball(rng, x_n, rho)
        gx = g(xa)
        gy = g(ya)
        if enorm(gx - x_n) > rho:
            self_bad += 1
        if enorm(gx - gy) > factor * enorm(xa - ya):
            contract_bad += 1
    return CertificateCheckReport(samples=samples, selfmap_violations=self_bad,
                                  contraction_violations=contract_bad)
