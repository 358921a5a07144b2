"""Dense linear-algebra contract: reusable LU factorizations.

The iteration matrix is never inverted explicitly; every occurrence of
``M^{-1} v`` in the solver is a factorized solve.  For 2x2 systems the
factorization delegates to the scalar routines in :mod:`._fastscan` so
that the generic solver and the compiled grid kernel run bit-identical
arithmetic.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

from . import _fastscan
from .errors import DomainViolation, SingularSystem

PIVOT_RTOL = 1e-14


def enorm(v) -> float:
    """Euclidean norm by sequential scalar accumulation.

    Deterministic across BLAS builds and identical to the compiled
    kernel's operation order for n == 2.
    """
    s = 0.0
    for c in v:
        c = float(c)
        s += c * c
    return math.sqrt(s)


def sumsq(v) -> float:
    s = 0.0
    for c in v:
        c = float(c)
        s += c * c
    return s


def matvec(a, v):
    """Row-wise sequential matrix-vector product (no BLAS, no FMA)."""
    n, m = a.shape
    out = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(m):
            s += float(a[i, j]) * float(v[j])
        out[i] = s
    return out


class LinearSolveHandle:
    """A reusable factorization of an n x n matrix.

    Read-only after construction; safe to share across workers.  Solving
    with a singular handle raises :class:`SingularSystem`.
    """

    def __init__(self, matrix: np.ndarray):
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix entries must be finite")
        self.n = m.shape[0]
        self._matrix = m.copy()
        self._matrix.flags.writeable = False
        self._condition: float | None = None
        if self.n == 2:
            self._fact2 = _fastscan.lu2(m[0, 0], m[0, 1], m[1, 0], m[1, 1])
            self.singular = self._fact2[5] != 0.0
            self._lu = None
        else:
            self._fact2 = None
            lu, piv = scipy.linalg.lu_factor(m, check_finite=False)
            norm1 = np.abs(m).sum(axis=0).max() if self.n else 0.0
            diag = np.abs(np.diag(lu))
            self.singular = bool(diag.min() <= PIVOT_RTOL * norm1) if self.n else False
            self._lu = (lu, piv)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def condition(self) -> float:
        """1-norm condition estimate (exact for these small dense systems)."""
        if self._condition is None:
            if self.singular:
                self._condition = math.inf
            else:
                inv = self._solve_unchecked(np.eye(self.n))
                norm1 = np.abs(self._matrix).sum(axis=0).max()
                self._condition = float(norm1 * np.abs(inv).sum(axis=0).max())
        return self._condition

    def _solve_unchecked(self, b: np.ndarray) -> np.ndarray:
        if self._fact2 is not None:
            sw, u00, u01, l10, u11, _ = self._fact2
            if b.ndim == 1:
                x0, x1 = _fastscan.lu2_solve(sw, u00, u01, l10, u11, float(b[0]), float(b[1]))
                return np.array([x0, x1])
            out = np.empty_like(b, dtype=float)
            for j in range(b.shape[1]):
                x0, x1 = _fastscan.lu2_solve(sw, u00, u01, l10, u11, float(b[0, j]), float(b[1, j]))
                out[0, j] = x0
                out[1, j] = x1
            return out
        return scipy.linalg.lu_solve(self._lu, b, check_finite=False)

    def solve(self, b) -> np.ndarray:
        """Solve M x = b; ``b`` may be a vector or a matrix of columns."""
        if self.singular:
            raise SingularSystem(f"matrix is singular to working precision (n={self.n})")
        return self._solve_unchecked(np.asarray(b, dtype=float))


def factorize(matrix) -> LinearSolveHandle:
    """LU-factorize a square matrix with partial pivoting."""
    return LinearSolveHandle(matrix)


def finite_difference_jacobian(problem, x, h: float | None = None) -> np.ndarray:
    """Central-difference Jacobian, column by column.

    Used as the independent oracle for analytic Jacobians.  ``h``
    defaults to eps^(1/3) * max(1, |x|).
    """
    x = np.asarray(x, dtype=float)
    if h is None:
        h = np.finfo(float).eps ** (1.0 / 3.0) * max(1.0, enorm(x))
    if h <= 0:
        raise ValueError("h must be positive")
    n = problem.dim
    cols = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        for probe in (x + e, x - e):
            if not problem.in_domain(probe):
                raise DomainViolation(f"finite-difference probe {probe} leaves the domain box")
        cols.append((problem.eval_f(x + e) - problem.eval_f(x - e)) / (2.0 * h))
    return np.column_stack(cols)
