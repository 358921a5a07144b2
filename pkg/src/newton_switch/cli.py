"""Command-line interface.

Subcommands:

  solve    trace one run from a start point (JSON trace optional)
  basins   scan a lattice, write a PPM basin image and/or CSV stats
  table1   run all four modes on one grid and write the comparison CSV
  field    sample the raw or transformed direction field to CSV
  certify  sampled falsification of the switch certificate at a point

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .basin import GridSpec, basin_scan, direction_field, resolve_workers, table1
from .certificate import verify_certificate_sampled
from .driver import MODES, SolverConfig, solve
from .errors import NewtonSwitchError, UsageError
from .imaging import image_from_report, write_csv_stats, write_field_csv, write_ppm
from .linalg import factorize
from .problems import get_problem
from .stepcontrol import StepControllerConfig

SUBCOMMANDS = ("solve", "basins", "table1", "field", "certify")

DEFAULT_BOX = (-3.0, 3.0, -3.0, 3.0)
DEFAULT_RES = (200, 200)


@dataclass(frozen=True)
class RunConfig:
    """Fully-defaulted run description; the defaults reproduce the
    sixth-roots lattice experiment at 200x200."""

    subcommand: str = "basins"
    problem: str = "z6m1"
    x0: tuple = (2.0, 0.0)
    mode: str = "AS"
    tau: float = 0.01
    eps: float = 1e-10
    t_lower: float = 1e-8
    max_outer: int = 500
    res: tuple = DEFAULT_RES
    box: tuple = DEFAULT_BOX
    out: Optional[str] = None
    csv: Optional[str] = None
    trace: Optional[str] = None
    seed: int = 0
    samples: int = 200
    workers: int = 1
    strict_algorithm1: bool = False
    transformed: bool = False

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            mode=self.mode, eps=self.eps, max_outer=self.max_outer,
            step=StepControllerConfig(tau=self.tau, t_lower=self.t_lower),
            strict_algorithm1=self.strict_algorithm1)

    def grid(self) -> GridSpec:
        return GridSpec(box=self.box, resolution=self.res)

    def to_argv(self) -> list:
        """Flags that parse back to an equal RunConfig."""
        # x0/box components may be negative, so use the '=' form that
        # argparse accepts for leading-dash values
        argv = [self.subcommand,
                "--problem", self.problem,
                f"--x0={self.x0[0]!r},{self.x0[1]!r}",
                "--mode", self.mode,
                "--tau", repr(self.tau),
                "--eps", repr(self.eps),
                "--t-lower", repr(self.t_lower),
                "--max-outer", str(self.max_outer),
                "--res", f"{self.res[0]},{self.res[1]}",
                "--box=" + ",".join(repr(b) for b in self.box),
                "--seed", str(self.seed),
                "--samples", str(self.samples),
                "--workers", str(self.workers)]
        for flag, val in (("--out", self.out), ("--csv", self.csv),
                          ("--trace", self.trace)):
            if val is not None:
                argv += [flag, val]
        if self.strict_algorithm1:
            argv.append("--strict-algorithm1")
        if self.transformed:
            argv.append("--transformed")
        return argv


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _pair(text: str, n: int, cast=float) -> tuple:
    parts = text.split(",")
    if len(parts) != n:
        raise UsageError(f"expected {n} comma-separated values, got {text!r}")
    try:
        return tuple(cast(p) for p in parts)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def build_parser() -> _Parser:
    p = _Parser(prog="newton-switch",
                description="Globalized Newton solver with a certified switch "
                            "to the frozen-Jacobian simplified iteration, plus "
                            "a basin-of-attraction laboratory.")
    sub = p.add_subparsers(dest="subcommand", required=True)
    common = {}
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--problem", default="z6m1",
                        help="built-in problem id (default: z6m1)")
        sp.add_argument("--x0", default="2,0",
                        help="start point as 'x,y' (solve/certify)")
        sp.add_argument("--mode", default="AS", choices=MODES,
                        help="AS adaptive+switch, ANS adaptive only, "
                             "NANS classical full-step Newton, NAS full steps+switch")
        sp.add_argument("--tau", type=float, default=0.01,
                        help="path-deviation tolerance for adaptive steps")
        sp.add_argument("--eps", type=float, default=1e-10,
                        help="convergence threshold on the correction norm")
        sp.add_argument("--t-lower", type=float, default=1e-8,
                        help="smallest damping factor the controller emits")
        sp.add_argument("--max-outer", type=int, default=500)
        sp.add_argument("--res", default="200,200", help="lattice 'nx,ny'")
        sp.add_argument("--box", default="-3,3,-3,3",
                        help="scan box 'xmin,xmax,ymin,ymax'")
        sp.add_argument("--out", default=None, help="output path (PPM or CSV)")
        sp.add_argument("--csv", default=None, help="stats CSV path")
        sp.add_argument("--trace", default=None, help="JSON trace path (solve)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int, default=200,
                        help="sample pairs for certify")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--strict-algorithm1", action="store_true",
                        help="fail instead of resuming after a guard violation")
        sp.add_argument("--transformed", action="store_true",
                        help="field: sample -J^{-1} f instead of f")
        common[name] = sp
    return p


def parse_cli(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    x0 = _pair(ns.x0, 2)
    res = _pair(ns.res, 2, int)
    box = _pair(ns.box, 4)
    if res[0] < 1 or res[1] < 1:
        raise UsageError(f"resolution must be positive, got {ns.res!r}")
    if not (box[0] < box[1] and box[2] < box[3]):
        raise UsageError(f"degenerate box {ns.box!r}")
    if ns.tau <= 0:
        raise UsageError("tau must be positive")
    if ns.eps <= 0:
        raise UsageError("eps must be positive")
    return RunConfig(
        subcommand=ns.subcommand, problem=ns.problem, x0=x0, mode=ns.mode,
        tau=ns.tau, eps=ns.eps, t_lower=ns.t_lower, max_outer=ns.max_outer,
        res=res, box=box, out=ns.out, csv=ns.csv, trace=ns.trace,
        seed=ns.seed, samples=ns.samples, workers=ns.workers,
        strict_algorithm1=ns.strict_algorithm1, transformed=ns.transformed)


def _cmd_solve(cfg: RunConfig, out) -> int:
    problem = get_problem(cfg.problem)
    if cfg.mode in ("NANS", "NAS") and cfg.tau != 0.01:
        print(f"warning: --tau is ignored in mode {cfg.mode} (full steps forced)",
              file=sys.stderr)
    trace = solve(problem, cfg.x0, cfg.solver_config())
    if cfg.trace:
        with open(cfg.trace, "w") as fh:
            fh.write(trace.to_json(indent=2))
            fh.write("\n")
    zero = "-" if trace.zero is None else \
        "(" + ", ".join(f"{c:.12g}" for c in trace.zero) + ")"
    print(f"outcome: {trace.outcome}", file=out)
    print(f"zero: {zero}", file=out)
    print(f"outer iterations: {trace.outer_iterations}", file=out)
    print(f"simplified sweeps: {trace.simplified_sweeps}", file=out)
    print(f"switched at: {trace.switched_at}", file=out)
    print(f"evaluations: f={trace.f_evals} J={trace.j_evals} "
          f"factorizations={trace.factorizations}", file=out)
    return 0 if trace.converged else 2


def _cmd_basins(cfg: RunConfig, out) -> int:
    problem = get_problem(cfg.problem)
    report = basin_scan(problem, cfg.grid(), cfg.solver_config(),
                        workers=resolve_workers(cfg.workers))
    if cfg.out:
        write_ppm(image_from_report(report), cfg.out)
        print(f"wrote {cfg.out} (PPM; convert with e.g. "
              f"`magick {cfg.out} basins.png`)", file=out)
    if cfg.csv:
        write_csv_stats(report, cfg.csv)
        print(f"wrote {cfg.csv}", file=out)
    print(f"convergent fraction: {report.convergent_fraction:.4f}", file=out)
    print(f"correct fraction: {report.correct_fraction:.4f}", file=out)
    return 0


def _cmd_table1(cfg: RunConfig, out) -> int:
    problem = get_problem(cfg.problem)
    record = table1(problem, cfg.grid(), cfg.solver_config())
    path = cfg.out or cfg.csv
    if path:
        write_csv_stats(record, path)
        print(f"wrote {path}", file=out)
    conv = record.convergent_row
    cplx = record.complexity_row
    print("metric," + ",".join(record.modes), file=out)
    print("convergent," + ",".join(f"{conv[m]:.4f}" for m in record.modes), file=out)
    print("complexity," + ",".join(f"{cplx[m]:.2f}" for m in record.modes), file=out)
    return 0


def _cmd_field(cfg: RunConfig, out) -> int:
    problem = get_problem(cfg.problem)
    res = cfg.res if cfg.res != DEFAULT_RES else (40, 40)
    samples = direction_field(problem, GridSpec(box=cfg.box, resolution=res),
                              transformed=cfg.transformed)
    if cfg.out:
        write_field_csv(samples, cfg.out)
        print(f"wrote {cfg.out}", file=out)
    else:
        print(f"sampled {len(samples)} field vectors "
              f"({'transformed' if cfg.transformed else 'raw'})", file=out)
    return 0


def _cmd_certify(cfg: RunConfig, out) -> int:
    problem = get_problem(cfg.problem)
    sc = cfg.solver_config()
    if not sc.switching:
        print(f"warning: mode {cfg.mode} never switches; using AS for certify",
              file=sys.stderr)
        sc = SolverConfig(mode="AS", eps=sc.eps, max_outer=sc.max_outer,
                          step=sc.step, strict_algorithm1=sc.strict_algorithm1)
    trace = solve(problem, cfg.x0, sc)
    if trace.switched_at is None:
        print("no switch occurred; nothing to certify", file=out)
        return 2
    cert = trace.certificates[trace.switched_at]
    x_switch = np.asarray(trace.switch_point, dtype=float)
    handle = factorize(problem.eval_jacobian(x_switch))
    report = verify_certificate_sampled(problem, x_switch, cert, handle,
                                        samples=cfg.samples, seed=cfg.seed)
    print(f"certificate: alpha={cert.alpha:.6g} omega_hat={cert.omega_hat:.6g} "
          f"kappa={cert.kappa:.6g}", file=out)
    print(f"radii: R={cert.radius_R:.6g} r={cert.radius_r:.6g}", file=out)
    print(f"samples: {report.samples}", file=out)
    print(f"self-map violations: {report.selfmap_violations}", file=out)
    print(f"contraction violations: {report.contraction_violations}", file=out)
    return 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_cli(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    handler = {"solve": _cmd_solve, "basins": _cmd_basins, "table1": _cmd_table1,
               "field": _cmd_field, "certify": _cmd_certify}[cfg.subcommand]
    try:
        return handler(cfg, sys.stdout)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (NewtonSwitchError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
