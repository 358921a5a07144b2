"""Basin-of-attraction laboratory: grid scans, correct-zero classification,
direction fields, and the four-mode comparison table.

A grid point counts as *convergent* when the solver reports success and
the limit matches a known zero; it counts as *correct* when that zero is
additionally the one owned by the start point's attractor of the flow
x' = -J_f(x)^{-1} f(x).  For the sixth-roots problem the attractors are
the six angular sectors of width pi/3 centered on the roots; for other
problems a fixed-step reference integration of the flow serves as the
oracle.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _fastscan
from .driver import SolverConfig, solve
from .linalg import enorm, factorize
from .problems import Problem, get_problem

ZERO_MATCH_TOL = 1e-6
SECTOR_BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Equally spaced lattice including the box corners."""

    box: tuple  # (x_min, x_max, y_min, y_max)
    resolution: tuple  # (nx, ny)

    def __post_init__(self):
        x0, x1, y0, y1 = self.box
        nx, ny = self.resolution
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"degenerate box {self.box}")
        if nx < 1 or ny < 1:
            raise ValueError(f"resolution must be positive, got {self.resolution}")

    def xs(self) -> np.ndarray:
        x0, x1, _, _ = self.box
        nx = self.resolution[0]
        return np.linspace(x0, x1, nx) if nx > 1 else np.array([0.5 * (x0 + x1)])

    def ys(self) -> np.ndarray:
        _, _, y0, y1 = self.box
        ny = self.resolution[1]
        return np.linspace(y0, y1, ny) if ny > 1 else np.array([0.5 * (y0 + y1)])

    @property
    def npoints(self) -> int:
        return self.resolution[0] * self.resolution[1]


@dataclass
class BasinReport:
    """Per-point outcomes of one grid scan plus aggregate statistics.

    Arrays are (ny, nx), indexed [row, col] = [y index, x index].
    ``zero_index`` is -1 where no known zero was reached.
    """

    problem: str
    mode: str
    grid: GridSpec
    zero_index: np.ndarray
    correct: np.ndarray
    converged: np.ndarray
    outer_iterations: np.ndarray
    switched: np.ndarray
    convergent_fraction: float
    correct_fraction: float
    wall_time: float
    relative_complexity: Optional[float] = None


@dataclass(frozen=True)
class DirectionFieldSample:
    point: tuple
    vector: tuple
    unit: tuple
    singular: bool


@dataclass
class Table1Record:
    """Four-mode comparison: correct fractions and wall-time ratios vs NANS."""

    problem: str
    grid: GridSpec
    modes: tuple = ("AS", "ANS", "NANS", "NAS")
    reports: dict = field(default_factory=dict)

    @property
    def convergent_row(self) -> dict:
        return {m: self.reports[m].correct_fraction for m in self.modes}

    @property
    def complexity_row(self) -> dict:
        return {m: self.reports[m].relative_complexity for m in self.modes}


# ---------------------------------------------------------------------------
# correct-zero classification
# ---------------------------------------------------------------------------

def _sector_index(theta: float) -> int:
    """Sector of width pi/3 around angle k*pi/3; boundary ties go low."""
    third = math.pi / 3.0
    u = theta / third
    # distance to the nearest sector boundary (odd multiples of pi/6)
    frac = u - math.floor(u)
    if abs(frac - 0.5) <= SECTOR_BOUNDARY_TOL / third:
        # on a boundary: assign the lower sector index
        k = int(math.floor(u))
    else:
        k = int(math.floor(u + 0.5))
    return k % 6


def correct_zero_of(x0, problem: Problem) -> int:
    """Index (into problem.known_zeros) of the attractor owning x0.

    For the sixth-roots problem this is the angular sector of x0; for
    generic problems the flow x' = -J_f^{-1} f is integrated with small
    fixed forward-Euler steps until it settles near a known zero.
    """
    if problem.known_zeros is None:
        raise ValueError(f"problem {problem.name!r} exposes no known zeros")
    x0 = np.asarray(x0, dtype=float)
    if problem.name == "z6m1":
        if float(x0[0]) == 0.0 and float(x0[1]) == 0.0:
            raise ValueError("the origin belongs to no sector")
        theta = math.atan2(float(x0[1]), float(x0[0]))
        return _sector_index(theta)
    return reference_flow_zero(problem, x0)


def reference_flow_zero(problem: Problem, x0, step: float = 1e-3,
                        max_steps: int = 200000) -> int:
    """High-accuracy attractor oracle: tiny-step Euler integration of the flow."""
    x = np.asarray(x0, dtype=float).copy()
    zeros = np.asarray(problem.known_zeros, dtype=float)
    for _ in range(max_steps):
        handle = factorize(problem.eval_jacobian(x))
        if handle.singular:
            raise ValueError(f"flow hit a singular Jacobian at {x}")
        fx = problem.eval_f(x)
        d = handle.solve(fx)
        x = x - step * d
        if enorm(d) * max(step, 1.0) < 1e-12:
            break
    dists = [enorm(x - z) for z in zeros]
    idx = int(np.argmin(dists))
    if dists[idx] > 1e-6:
        raise ValueError(f"flow from {np.asarray(x0)} did not settle near a known zero")
    return idx


def classify_zero(point, problem: Problem) -> int:
    """Nearest known zero within the matching tolerance, else -1."""
    if point is None:
        return -1
    zeros = np.asarray(problem.known_zeros, dtype=float)
    d = [enorm(np.asarray(point, dtype=float) - z) for z in zeros]
    idx = int(np.argmin(d))
    return idx if d[idx] <= ZERO_MATCH_TOL else -1


def _sector_grid(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized sector classification for the z6m1 lattice."""
    gx, gy = np.meshgrid(xs, ys)
    theta = np.arctan2(gy, gx)
    third = math.pi / 3.0
    u = theta / third
    frac = u - np.floor(u)
    on_boundary = np.abs(frac - 0.5) <= SECTOR_BOUNDARY_TOL / third
    k = np.where(on_boundary, np.floor(u), np.floor(u + 0.5)).astype(np.int64)
    return np.mod(k, 6)


# ---------------------------------------------------------------------------
# grid scanning
# ---------------------------------------------------------------------------

def _kernel_scan_rows(args):
    (pid, xs, ys, row0, row1, eps, max_outer, tau, t_lower, growth, shrink,
     simpl_eps, max_sweeps, switching, strict) = args
    ny, nx = len(ys), len(xs)
    outcome = np.zeros((ny, nx), dtype=np.int8)
    zx = np.zeros((ny, nx))
    zy = np.zeros((ny, nx))
    outer = np.zeros((ny, nx), dtype=np.int32)
    switched = np.zeros((ny, nx), dtype=np.int32)
    _fastscan.scan_grid(pid, xs, ys, row0, row1, eps, max_outer, tau, t_lower,
                        growth, shrink, simpl_eps, max_sweeps, switching, strict,
                        outcome, zx, zy, outer, switched)
    return row0, row1, outcome[row0:row1], zx[row0:row1], zy[row0:row1], \
        outer[row0:row1], switched[row0:row1]


def basin_scan(problem: Problem, grid: GridSpec, cfg: SolverConfig,
               workers: int = 1) -> BasinReport:
    """Run the solver on every lattice point and classify the outcomes.

    All non-timing fields are independent of ``workers``; lattice rows are
    distributed across a process pool and merged by index.
    """
    xs = grid.xs()
    ys = grid.ys()
    ny, nx = len(ys), len(xs)
    tau = cfg.effective_tau
    simpl_eps = cfg.eps if cfg.simplified_eps is None else cfg.simplified_eps

    t0 = time.perf_counter()
    if problem.kernel_id is not None and problem.dim == 2:
        outcome = np.zeros((ny, nx), dtype=np.int8)
        zx = np.zeros((ny, nx))
        zy = np.zeros((ny, nx))
        outer = np.zeros((ny, nx), dtype=np.int32)
        switched = np.zeros((ny, nx), dtype=np.int32)
        if workers <= 1:
            _fastscan.scan_grid(problem.kernel_id, xs, ys, 0, ny, cfg.eps,
                                cfg.max_outer, tau, cfg.step.t_lower,
                                cfg.step.growth, cfg.step.shrink, simpl_eps,
                                cfg.max_sweeps, cfg.switching,
                                cfg.strict_algorithm1, outcome, zx, zy, outer,
                                switched)
        else:
            bounds = np.linspace(0, ny, workers + 1).astype(int)
            jobs = [(problem.kernel_id, xs, ys, int(a), int(b), cfg.eps,
                     cfg.max_outer, tau, cfg.step.t_lower, cfg.step.growth,
                     cfg.step.shrink, simpl_eps, cfg.max_sweeps, cfg.switching,
                     cfg.strict_algorithm1)
                    for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for row0, row1, oc, bx, by, ot, sa in pool.map(_kernel_scan_rows, jobs):
                    outcome[row0:row1] = oc
                    zx[row0:row1] = bx
                    zy[row0:row1] = by
                    outer[row0:row1] = ot
                    switched[row0:row1] = sa
        converged = outcome == _fastscan.CONVERGED
        switched_mask = switched >= 0
    else:
        outcome = np.zeros((ny, nx), dtype=np.int8)
        zx = np.full((ny, nx), np.nan)
        zy = np.full((ny, nx), np.nan)
        outer = np.zeros((ny, nx), dtype=np.int32)
        switched_mask = np.zeros((ny, nx), dtype=bool)
        for i, yv in enumerate(ys):
            for j, xv in enumerate(xs):
                trace = solve(problem, (xv, yv), cfg)
                outer[i, j] = trace.outer_iterations
                switched_mask[i, j] = trace.switched_at is not None
                if trace.converged:
                    outcome[i, j] = 0
                    zx[i, j], zy[i, j] = trace.zero
                else:
                    outcome[i, j] = 1
        converged = outcome == 0
    wall = time.perf_counter() - t0

    # classify limits against the known zeros
    zeros = np.asarray(problem.known_zeros, dtype=float)
    zero_index = np.full((ny, nx), -1, dtype=np.int32)
    d2 = np.full((ny, nx), np.inf)
    for idx, z in enumerate(zeros):
        dz = (zx - z[0]) ** 2 + (zy - z[1]) ** 2
        closer = converged & (dz < d2)
        zero_index[closer] = idx
        d2[closer] = dz[closer]
    zero_index[d2 > ZERO_MATCH_TOL ** 2] = -1

    if problem.name == "z6m1":
        wanted = _sector_grid(xs, ys)
    else:
        wanted = np.full((ny, nx), -1, dtype=np.int64)
        for i, yv in enumerate(ys):
            for j, xv in enumerate(xs):
                try:
                    wanted[i, j] = correct_zero_of((xv, yv), problem)
                except ValueError:
                    wanted[i, j] = -2  # singular start: excluded from the tally
    correct = (zero_index >= 0) & (zero_index == wanted)

    n = grid.npoints
    return BasinReport(
        problem=problem.name,
        mode=cfg.mode,
        grid=grid,
        zero_index=zero_index,
        correct=correct,
        converged=converged,
        outer_iterations=outer,
        switched=switched_mask,
        convergent_fraction=float((zero_index >= 0).sum()) / n,
        correct_fraction=float(correct.sum()) / n,
        wall_time=wall,
    )


def table1(problem: Problem, grid: GridSpec, base_cfg: SolverConfig,
           warmup: bool = True, repeats: int = 3) -> Table1Record:
    """Scan the identical grid in all four modes (single worker, timed).

    Wall-time ratios are normalized by the NANS scan.  A discarded warm-up
    scan keeps caches comparable across modes, and each mode is timed
    ``repeats`` times with the minimum wall time kept (non-timing output
    is deterministic, so the repeats are otherwise identical).
    """
    record = Table1Record(problem=problem.name, grid=grid)
    if warmup:
        basin_scan(problem, grid, _with_mode(base_cfg, "NANS"), workers=1)
    # round-robin over the modes so a transient load burst cannot bias a
    # single mode's minimum
    for _ in range(max(1, repeats)):
        for mode in record.modes:
            rep = basin_scan(problem, grid, _with_mode(base_cfg, mode), workers=1)
            prev = record.reports.get(mode)
            if prev is None or rep.wall_time < prev.wall_time:
                record.reports[mode] = rep
    base = record.reports["NANS"].wall_time
    for mode in record.modes:
        record.reports[mode].relative_complexity = record.reports[mode].wall_time / base
    return record


def _with_mode(cfg: SolverConfig, mode: str) -> SolverConfig:
    return SolverConfig(mode=mode, eps=cfg.eps, max_outer=cfg.max_outer,
                        step=cfg.step, simplified_eps=cfg.simplified_eps,
                        max_sweeps=cfg.max_sweeps,
                        strict_algorithm1=cfg.strict_algorithm1)


def direction_field(problem: Problem, grid: GridSpec,
                    transformed: bool) -> list:
    """Sample f (raw) or -J_f^{-1} f (transformed) on the lattice."""
    samples = []
    for yv in grid.ys():
        for xv in grid.xs():
            p = np.array([xv, yv])
            singular = False
            if transformed:
                handle = factorize(problem.eval_jacobian(p))
                if handle.singular:
                    singular = True
                    vec = np.array([np.nan, np.nan])
                else:
                    vec = -handle.solve(problem.eval_f(p))
            else:
                vec = problem.eval_f(p)
            nrm = enorm(vec) if not singular else 0.0
            unit = vec / nrm if nrm > 0 else vec * 0.0
            samples.append(DirectionFieldSample(
                point=(float(xv), float(yv)),
                vector=(float(vec[0]), float(vec[1])),
                unit=(float(unit[0]), float(unit[1])),
                singular=singular))
    return samples


def resolve_workers(requested: Optional[int]) -> int:
    """CLI worker count; the NEWTON_SWITCH_THREADS env var wins."""
    env = os.environ.get("NEWTON_SWITCH_THREADS")
    if env:
        return max(1, int(env))
    return max(1, requested or 1)
