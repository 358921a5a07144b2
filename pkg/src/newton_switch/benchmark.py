"""Benchmark the grid kernel: compiled extension vs interpreted fallback.

Run as `python -m newton_switch.benchmark [--res NX,NY] [--mode MODE]`.
The two flavors execute the same source file; besides timing, the script
checks that their grid outputs agree bitwise.
"""

from __future__ import annotations

import argparse
import importlib.util
import math
import pathlib
import sys
import time

import numpy as np

from . import _fastscan as active


def load_pure_kernel():
    """Import the interpreted flavor of the kernel from its .py source,
    regardless of whether the compiled extension is installed."""
    src = pathlib.Path(__file__).with_name("_fastscan.py")
    spec = importlib.util.spec_from_file_location("newton_switch._fastscan_pure", src)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    assert not mod.IS_COMPILED
    return mod


def _scan(kernel, nx, ny, tau, switching):
    xs = np.linspace(-3.0, 3.0, nx)
    ys = np.linspace(-3.0, 3.0, ny)
    outcome = np.zeros((ny, nx), dtype=np.int8)
    zx = np.zeros((ny, nx))
    zy = np.zeros((ny, nx))
    outer = np.zeros((ny, nx), dtype=np.int32)
    switched = np.zeros((ny, nx), dtype=np.int32)
    t0 = time.perf_counter()
    counters = kernel.scan_grid(0, xs, ys, 0, ny, 1e-10, 500, tau, 1e-8,
                                2.0, 0.5, 1e-10, 200, switching, False,
                                outcome, zx, zy, outer, switched)
    wall = time.perf_counter() - t0
    return wall, (outcome, zx, zy, outer, switched), counters


def run_benchmark(nx=120, ny=120, mode="AS", out=sys.stdout):
    tau = 0.01 if mode in ("AS", "ANS") else math.inf
    switching = mode in ("AS", "NAS")
    pure = load_pure_kernel()
    flavors = []
    if active.IS_COMPILED:
        flavors.append(("compiled", active))
    else:
        print("note: compiled extension unavailable; timing fallback only", file=out)
    flavors.append(("pure python", pure))

    results = {}
    for name, kernel in flavors:
        _scan(kernel, 16, 16, tau, switching)  # warm-up
        wall, arrays, _ = _scan(kernel, nx, ny, tau, switching)
        results[name] = (wall, arrays)
        rate = nx * ny / wall
        print(f"{name:>12}: {wall:8.3f} s  ({rate:10.0f} points/s)", file=out)

    if len(results) == 2:
        (w_c, a_c), (w_p, a_p) = results["compiled"], results["pure python"]
        match = all(np.array_equal(x, y) for x, y in zip(a_c, a_p))
        print(f"{'speedup':>12}: {w_p / w_c:8.1f}x", file=out)
        print(f"{'bitwise':>12}: {'identical' if match else 'MISMATCH'}", file=out)
        return match
    return True


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--res", default="120,120")
    ap.add_argument("--mode", default="AS", choices=("AS", "ANS", "NANS", "NAS"))
    ns = ap.parse_args(argv)
    nx, ny = (int(v) for v in ns.res.split(","))
    ok = run_benchmark(nx, ny, ns.mode)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
