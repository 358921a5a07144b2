"""Problem abstraction and the built-in problem registry.

A :class:`Problem` bundles the residual map f, its analytic Jacobian and
optional metadata (known zeros, singular set) used only by the basin
laboratory.  Complex polynomial examples are stored pre-split into real
form: z^6 - 1 on C becomes a map R^2 -> R^2.

Built-in 2-D problems evaluate through :mod:`._fastscan`, so the generic
solver sees exactly the same floating-point values as the compiled grid
kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import _fastscan
from .errors import DomainViolation


@dataclass(frozen=True)
class DomainBox:
    """Axis-aligned representation of the open domain U."""

    lo: tuple
    hi: tuple

    @staticmethod
    def unbounded(n: int) -> "DomainBox":
        return DomainBox((-math.inf,) * n, (math.inf,) * n)

    def contains(self, x) -> bool:
        return all(l <= float(c) <= h for l, c, h in zip(self.lo, x, self.hi))


@dataclass(frozen=True)
class Problem:
    """The function f, its Jacobian J_f, and experiment metadata."""

    name: str
    dim: int
    f: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    domain: DomainBox = None  # type: ignore[assignment]
    known_zeros: Optional[tuple] = None
    # distance to the singular set of J_f (None when J_f is regular everywhere)
    singular_distance: Optional[Callable[[np.ndarray], float]] = None
    kernel_id: Optional[int] = None  # id inside _fastscan, if accelerated

    def __post_init__(self):
        if self.domain is None:
            object.__setattr__(self, "domain", DomainBox.unbounded(self.dim))

    def in_domain(self, x) -> bool:
        return self.domain.contains(x)

    def eval_f(self, x) -> np.ndarray:
        if not self.in_domain(x):
            raise DomainViolation(f"{np.asarray(x)} outside domain box of {self.name!r}")
        return np.asarray(self.f(np.asarray(x, dtype=float)), dtype=float)

    def eval_jacobian(self, x) -> np.ndarray:
        if not self.in_domain(x):
            raise DomainViolation(f"{np.asarray(x)} outside domain box of {self.name!r}")
        return np.asarray(self.jacobian(np.asarray(x, dtype=float)), dtype=float)


@dataclass(frozen=True)
class MatrixPolicy:
    """Which matrix M(x) drives the iteration.

    ``identity``: M = Id (Picard iteration); ``current``: M = J_f(x);
    ``frozen``: M = J_f(x_s) for a fixed base point x_s.  Frozen policies
    hold their matrix and return the same (read-only) array for every
    query.
    """

    kind: str  # "identity" | "current" | "frozen"
    base_point: Optional[tuple] = None
    _frozen_matrix: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @staticmethod
    def identity() -> "MatrixPolicy":
        return MatrixPolicy("identity")

    @staticmethod
    def current_jacobian() -> "MatrixPolicy":
        return MatrixPolicy("current")

    @staticmethod
    def frozen(problem: Problem, x_s) -> "MatrixPolicy":
        x_s = np.asarray(x_s, dtype=float)
        m = problem.eval_jacobian(x_s)
        m = m.copy()
        m.flags.writeable = False
        return MatrixPolicy("frozen", tuple(x_s), m)

    def matrix(self, problem: Problem, x) -> np.ndarray:
        if self.kind == "identity":
            return np.eye(problem.dim)
        if self.kind == "current":
            return problem.eval_jacobian(x)
        return self._frozen_matrix


# ---------------------------------------------------------------------------
# built-in problems
# ---------------------------------------------------------------------------

def _kernel_f(pid):
    def f(x):
        return np.array(_fastscan.eval_f(pid, float(x[0]), float(x[1])))
    return f


def _kernel_jac(pid):
    def jac(x):
        j00, j01, j10, j11 = _fastscan.eval_jac(pid, float(x[0]), float(x[1]))
        return np.array([[j00, j01], [j10, j11]])
    return jac


def _dist_origin(x) -> float:
    return math.hypot(float(x[0]), float(x[1]))


def _dist_axes(x) -> float:
    return min(abs(float(x[0])), abs(float(x[1])))


_SQRT3_2 = math.sqrt(3.0) / 2.0

# sixth roots of unity, ordered by angle k*pi/3 (matches the sector index)
Z6M1_ZEROS = (
    (1.0, 0.0),
    (0.5, _SQRT3_2),
    (-0.5, _SQRT3_2),
    (-1.0, 0.0),
    (-0.5, -_SQRT3_2),
    (0.5, -_SQRT3_2),
)

Z3M1_ZEROS = (
    (1.0, 0.0),
    (-0.5, _SQRT3_2),
    (-0.5, -_SQRT3_2),
)

QUAD2_ZEROS = ((1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0))


REGISTRY = {
    "z6m1": Problem(
        name="z6m1",
        dim=2,
        f=_kernel_f(_fastscan.PID_Z6M1),
        jacobian=_kernel_jac(_fastscan.PID_Z6M1),
        known_zeros=Z6M1_ZEROS,
        singular_distance=_dist_origin,
        kernel_id=_fastscan.PID_Z6M1,
    ),
    "z3m1": Problem(
        name="z3m1",
        dim=2,
        f=_kernel_f(_fastscan.PID_Z3M1),
        jacobian=_kernel_jac(_fastscan.PID_Z3M1),
        known_zeros=Z3M1_ZEROS,
        singular_distance=_dist_origin,
        kernel_id=_fastscan.PID_Z3M1,
    ),
    "quad2": Problem(
        name="quad2",
        dim=2,
        f=_kernel_f(_fastscan.PID_QUAD2),
        jacobian=_kernel_jac(_fastscan.PID_QUAD2),
        known_zeros=QUAD2_ZEROS,
        singular_distance=_dist_axes,
        kernel_id=_fastscan.PID_QUAD2,
    ),
}


def get_problem(name: str) -> Problem:
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; available: {sorted(REGISTRY)}") from None


def scalar_problem(name: str, f: Callable[[float], float], df: Callable[[float], float],
                   zeros: Sequence[float] = ()) -> Problem:
    """Wrap a scalar function as a 1-D Problem (handy for tests and demos)."""
    return Problem(
        name=name,
        dim=1,
        f=lambda x: np.array([f(float(x[0]))]),
        jacobian=lambda x: np.array([[df(float(x[0]))]]),
        known_zeros=tuple((float(z),) for z in zeros),
    )
