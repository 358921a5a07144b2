"""Top-level acceptance checks, one per contractual criterion.

Each test prints a single ``criterion N: PASS/FAIL`` line before asserting,
so the verdicts survive in captured output even when later tests fail.
"""

import numpy as np
import pytest

import newton_switch as ns
from newton_switch.basin import GridSpec, basin_scan
from newton_switch.certificate import (build_certificate, estimate_omega_hat,
                                       radii, verdict,
                                       verify_certificate_sampled)
from newton_switch.imaging import image_from_report, write_ppm
from newton_switch.kernel import simplified_iterate
from newton_switch.problems import scalar_problem

from conftest import complex_newton


@pytest.fixture
def _verdict_line(capsys):
    """Emit one pass/fail line per criterion, visible in any pytest run."""
    def emit(num: int, ok: bool, detail: str) -> bool:
        line = f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}"
        with capsys.disabled():
            print(line, flush=True)
        return ok
    return emit


def test_criterion_1_table1_fractions(table1_record, _verdict_line):
    conv = table1_record.convergent_row
    wall = {m: table1_record.reports[m].wall_time for m in table1_record.modes}
    ok = (0.77 <= conv["NANS"] <= 0.84
          and conv["AS"] >= 0.995
          and conv["ANS"] >= 0.995
          and abs(conv["NAS"] - conv["NANS"]) <= 0.02
          and max(wall.values()) < 60.0)
    detail = ("correct fractions AS={AS:.4f} ANS={ANS:.4f} NANS={NANS:.4f} "
              "NAS={NAS:.4f}".format(**conv)
              + f", slowest scan {max(wall.values()):.2f}s")
    assert _verdict_line(1, ok, detail)


def test_criterion_2_complexity_orderings(table1_record, _verdict_line):
    cplx = table1_record.complexity_row
    ok = cplx["AS"] < cplx["ANS"] and cplx["NAS"] <= 1.15
    detail = ("relative wall times AS={AS:.2f} ANS={ANS:.2f} NANS={NANS:.2f} "
              "NAS={NAS:.2f}".format(**cplx))
    assert _verdict_line(2, ok, detail)


def test_criterion_3_radius_identities(_verdict_line):
    rng = np.random.default_rng(101)
    ok = True
    for _ in range(1000):
        kappa = rng.uniform(0.0, 0.99)
        omega = 10.0 ** rng.uniform(-6, 4)
        alpha = rng.uniform(0.0, 1.0) * 0.5 * (1.0 - kappa) ** 2 / omega
        big, small = radii(kappa, omega, alpha)
        s_ref = 2.0 * (1.0 - kappa) / omega
        p_ref = 2.0 * alpha / omega
        if big is None or abs((big + small) - s_ref) > 1e-12 * s_ref:
            ok = False
            break
        if p_ref > 0 and abs(big * small - p_ref) > 1e-12 * p_ref:
            ok = False
            break
    from fractions import Fraction
    agree = 0
    consistent = 0
    total = 100_000
    for i in range(total):
        kappa = rng.uniform(0.0, 1.2)
        omega = 10.0 ** rng.uniform(-3, 3)
        if i % 10 == 0:  # exact boundary cases
            kappa = min(kappa, 0.999)
            alpha = 0.5 * (1.0 - kappa) ** 2 / omega
        else:
            alpha = 10.0 ** rng.uniform(-3, 3)
        v = verdict(alpha, omega, kappa)
        # the verdict and the discriminant-keyed radii may never disagree
        if (radii(kappa, omega, alpha) != (None, None)) == v:
            consistent += 1
        # away from the floating boundary, the verdict equals the exact
        # rational inequality; within one ulp either answer is admissible
        lhs = Fraction(alpha) * Fraction(omega)
        rhs = Fraction(max(0.0, 1.0 - kappa)) ** 2 / 2
        band = Fraction(1, 10 ** 12) * rhs
        if abs(lhs - rhs) <= band or v == (kappa < 1.0 and lhs <= rhs):
            agree += 1
    ok = ok and agree == total and consistent == total
    assert _verdict_line(
        3, ok, f"1000 admissible triples within 1e-12; verdict/radii "
               f"consistency {consistent}/{total}, exact-inequality "
               f"agreement {agree}/{total}")


def test_criterion_4_sampled_contraction_check(_verdict_line):
    p = scalar_problem("square", lambda x: x * x - 1.0, lambda x: 2.0 * x)
    x_n = np.array([1.2])
    handle = ns.factorize(np.array([[2.4]]))
    cert = build_certificate(alpha=11.0 / 60.0, omega_hat=2.0 / 2.4)
    rep = verify_certificate_sampled(p, x_n, cert, handle,
                                     samples=10_000, seed=7)
    run = simplified_iterate(p, x_n, handle, eps=1e-14,
                             guard_radius=cert.radius_R)
    ok = (rep.selfmap_violations == 0 and rep.contraction_violations == 0
          and run.converged
          and abs(run.point[0] - 1.0) <= 1e-12
          and abs(run.point[0] - 1.2) <= cert.radius_R)
    assert _verdict_line(
        4, ok, f"{rep.samples} samples, {rep.selfmap_violations} self-map / "
               f"{rep.contraction_violations} contraction violations; "
               f"iteration limit {run.point[0]:.15f}")


def test_criterion_5_omega_hat_closed_form(_verdict_line):
    p = scalar_problem("sq", lambda x: x * x, lambda x: 2.0 * x)
    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(100):
        x_n = rng.uniform(0.2, 3.0) * rng.choice([-1.0, 1.0])
        h = rng.uniform(1e-6, 0.1) * rng.choice([-1.0, 1.0])
        x_next = x_n + h
        handle = ns.factorize(p.eval_jacobian([x_n]))
        w = estimate_omega_hat(handle, p.eval_jacobian([x_next]),
                               p.eval_jacobian([x_n]), [x_next], [x_n])
        worst = max(worst, abs(w - 1.0 / abs(x_n)) * abs(x_n))
    ok = worst <= 1e-12
    assert _verdict_line(5, ok, f"max relative error {worst:.3g} over 100 pairs")


def test_criterion_6_omega_hat_affine_covariance(z6m1, _verdict_line):
    rng = np.random.default_rng(103)
    x_n = np.array([1.5, 0.7])
    x_next = np.array([1.2, 0.5])
    j_n = z6m1.eval_jacobian(x_n)
    j_next = z6m1.eval_jacobian(x_next)
    base = estimate_omega_hat(ns.factorize(j_n), j_next, j_n, x_next, x_n)
    worst = 0.0
    tried = 0
    while tried < 50:
        a = rng.standard_normal((2, 2))
        if abs(np.linalg.det(a)) < 1e-2:
            continue
        w = estimate_omega_hat(ns.factorize(a @ j_n), a @ j_next, a @ j_n,
                               x_next, x_n)
        worst = max(worst, abs(w - base) / base)
        tried += 1
    ok = worst <= 1e-10
    assert _verdict_line(6, ok, f"max relative drift {worst:.3g} over 50 maps")


def test_criterion_7_frozen_phase_economy(z6m1, _verdict_line):
    cfg = ns.SolverConfig(mode="AS")
    checked = 0
    violations = 0
    for xv in np.linspace(-3, 3, 40):
        for yv in np.linspace(-3, 3, 40):
            if checked >= 1000:
                break
            tr = ns.solve(z6m1, (xv, yv), cfg)
            if not tr.converged or tr.switched_at is None:
                continue
            if (tr.j_evals != tr.j_evals_at_switch
                    or tr.factorizations != tr.factorizations_at_switch):
                violations += 1
            checked += 1
    ok = checked >= 1000 and violations == 0
    assert _verdict_line(
        7, ok, f"{violations} post-switch Jacobian/factorization counts "
               f"over {checked} switched runs")


def test_criterion_8_complex_oracle(z6m1, _verdict_line):
    rng = np.random.default_rng(104)
    cfg = ns.SolverConfig(mode="NANS")
    compared = 0
    mismatches = 0
    while compared < 100:
        x0 = rng.uniform(-3, 3, 2)
        if np.hypot(*x0) < 0.05:
            continue
        tr = ns.solve(z6m1, x0, cfg)
        z_ref, n_ref = complex_newton(complex(*x0))
        if tr.outcome == "Converged":
            if (z_ref is None or abs(complex(*tr.zero) - z_ref) >= 1e-8
                    or abs(tr.outer_iterations - n_ref) > 1):
                mismatches += 1
        elif z_ref is not None:
            mismatches += 1
        compared += 1
    ok = mismatches == 0
    assert _verdict_line(8, ok, f"{mismatches} oracle mismatches over 100 starts")


def test_criterion_9_jacobian_correctness(_verdict_line):
    rng = np.random.default_rng(105)
    worst = 0.0
    for name in ("z6m1", "z3m1", "quad2"):
        p = ns.get_problem(name)
        for _ in range(50):
            x = rng.uniform(-2.5, 2.5, 2)
            if p.singular_distance(x) < 0.3:
                continue
            fd = ns.finite_difference_jacobian(p, x)
            scale = max(1.0, float(np.abs(p.eval_jacobian(x)).max()))
            worst = max(worst, float(np.abs(fd - p.eval_jacobian(x)).max())
                        / scale)
    ok = worst <= 5e-6
    assert _verdict_line(9, ok, f"max scaled finite-difference error {worst:.3g}")


def test_criterion_10_determinism(z6m1, tmp_path, _verdict_line):
    g = GridSpec(box=(-3, 3, -3, 3), resolution=(40, 40))
    a = basin_scan(z6m1, g, ns.SolverConfig(mode="AS"), workers=1)
    b = basin_scan(z6m1, g, ns.SolverConfig(mode="AS"), workers=4)
    arrays_equal = (np.array_equal(a.zero_index, b.zero_index)
                    and np.array_equal(a.correct, b.correct)
                    and np.array_equal(a.converged, b.converged)
                    and np.array_equal(a.outer_iterations, b.outer_iterations)
                    and np.array_equal(a.switched, b.switched))
    p1, p2 = tmp_path / "r1.ppm", tmp_path / "r2.ppm"
    write_ppm(image_from_report(a), p1)
    write_ppm(image_from_report(
        basin_scan(z6m1, g, ns.SolverConfig(mode="AS"), workers=1)), p2)
    bytes_equal = p1.read_bytes() == p2.read_bytes()
    ok = arrays_equal and bytes_equal
    assert _verdict_line(
        10, ok, f"1-vs-4-worker arrays equal: {arrays_equal}; "
                f"repeated PPM byte-identical: {bytes_equal}")
