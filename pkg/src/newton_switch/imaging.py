"""Deterministic artifact output: binary PPM basin images and CSV tables.

No timestamps, no floating formatting drift: identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import IoFailure

# fixed 8-entry palette: indices 0-5 color the six zeros, 6 marks
# non-convergent points, 7 marks convergence to the wrong zero
PALETTE = (
    (230, 25, 75),    # 0  red
    (60, 180, 75),    # 1  green
    (255, 225, 25),   # 2  yellow
    (0, 130, 200),    # 3  blue
    (245, 130, 48),   # 4  orange
    (145, 30, 180),   # 5  purple
    (0, 0, 0),        # 6  black: not convergent
    (255, 255, 255),  # 7  white: wrong zero
)

NONCONVERGENT = 6
WRONG_ZERO = 7


@dataclass(frozen=True)
class BasinImage:
    """Palette-indexed raster; pixels[i, j] sits at lattice (x_j, y_i)
    with y increasing upward (row 0 is the *bottom* of the box)."""

    width: int
    height: int
    pixels: np.ndarray  # (height, width) uint8 palette indices

    def __post_init__(self):
        if self.pixels.shape != (self.height, self.width):
            raise ValueError(
                f"pixel array {self.pixels.shape} does not match "
                f"{self.height}x{self.width}")
        if self.pixels.size and int(self.pixels.max()) >= len(PALETTE):
            raise ValueError("palette index out of range")


def image_from_report(report) -> BasinImage:
    """Color a BasinReport: correct zeros by index, wrong zeros white,
    non-convergent black."""
    zi = report.zero_index
    px = np.full(zi.shape, NONCONVERGENT, dtype=np.uint8)
    reached = zi >= 0
    px[reached] = WRONG_ZERO
    px[reached & report.correct] = zi[reached & report.correct].astype(np.uint8)
    ny, nx = zi.shape
    return BasinImage(width=nx, height=ny, pixels=px)


def write_ppm(image: BasinImage, path) -> None:
    """Binary PPM (P6), 8-bit RGB, top raster row first (largest y)."""
    lut = np.asarray(PALETTE, dtype=np.uint8)
    rgb = lut[image.pixels[::-1]]  # flip: row 0 is bottom of the box
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(rgb.tobytes())
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def write_csv_stats(report, path) -> None:
    """CSV summary: `metric,AS,ANS,NANS,NAS` for a table-1 record, or
    `metric,<mode>` for a single-mode report.  Fractions use 4 decimals,
    complexity ratios 2."""
    if hasattr(report, "reports"):  # Table1Record
        modes = list(report.modes)
        conv = [report.reports[m].correct_fraction for m in modes]
        cplx = [report.reports[m].relative_complexity for m in modes]
    else:  # single BasinReport
        modes = [report.mode]
        conv = [report.correct_fraction]
        cplx = [report.relative_complexity]
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["metric"] + modes)
            w.writerow(["convergent"] + [f"{v:.4f}" for v in conv])
            if all(c is not None for c in cplx):
                w.writerow(["complexity"] + [f"{v:.2f}" for v in cplx])
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def write_field_csv(samples, path) -> None:
    """Direction-field samples as CSV rows x,y,vx,vy,ux,uy,singular."""
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "vx", "vy", "ux", "uy", "singular"])
            for s in samples:
                w.writerow([f"{s.point[0]:.17g}", f"{s.point[1]:.17g}",
                            f"{s.vector[0]:.17g}", f"{s.vector[1]:.17g}",
                            f"{s.unit[0]:.17g}", f"{s.unit[1]:.17g}",
                            int(s.singular)])
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
