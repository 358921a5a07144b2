# cython: boundscheck=False, wraparound=False, cdivision=True
"""Hot per-point solver kernel for the 2-D built-in problems.

Single-source Cython module: when the package is built this file is
compiled to a C extension; otherwise the very same file runs as plain
Python.  ``IS_COMPILED`` reports which flavor is active.

Every formula here is written so that both flavors execute the identical
sequence of IEEE-754 double operations (scalar adds/multiplies, correctly
rounded sqrt).  The generic driver in :mod:`newton_switch.driver` mirrors
the same operation order for n == 2, which lets the test suite assert
exact agreement between the fast grid scan and the fully traced solver.
"""

import cython

if cython.compiled:
    from cython.cimports.libc.math import INFINITY, fabs, isfinite, sqrt
else:
    from math import fabs, isfinite, sqrt
    from math import inf as INFINITY

IS_COMPILED = cython.compiled

# outcome codes (shared with driver.SolveTrace)
CONVERGED = 0
MAX_ITERATIONS = 1
SINGULAR_ABORT = 2
NON_FINITE = 3

# built-in problem ids (see problems.REGISTRY)
PID_Z6M1 = 0
PID_Z3M1 = 1
PID_QUAD2 = 2

PIVOT_RTOL = 1e-14
DIVERGENCE_BOUND = 1e8


# ---------------------------------------------------------------------------
# built-in problem evaluation
# ---------------------------------------------------------------------------

@cython.cfunc
def _f(pid: cython.int, x: cython.double, y: cython.double) -> tuple[cython.double, cython.double]:
    z2r: cython.double
    z2i: cython.double
    z4r: cython.double
    z4i: cython.double
    if pid == 0:
        # z^6 - 1 split into real/imaginary parts
        z2r = x * x - y * y
        z2i = 2.0 * x * y
        z4r = z2r * z2r - z2i * z2i
        z4i = 2.0 * z2r * z2i
        return (z4r * z2r - z4i * z2i - 1.0, z4r * z2i + z4i * z2r)
    elif pid == 1:
        # z^3 - 1
        z2r = x * x - y * y
        z2i = 2.0 * x * y
        return (z2r * x - z2i * y - 1.0, z2r * y + z2i * x)
    else:
        # decoupled quadratics (x^2 - 1, y^2 - 1)
        return (x * x - 1.0, y * y - 1.0)


@cython.cfunc
def _jac(pid: cython.int, x: cython.double, y: cython.double) -> tuple[cython.double, cython.double, cython.double, cython.double]:
    z2r: cython.double
    z2i: cython.double
    z4r: cython.double
    z4i: cython.double
    a: cython.double
    b: cython.double
    if pid == 0:
        # 6 z^5, laid out as the Cauchy-Riemann block [[a, -b], [b, a]]
        z2r = x * x - y * y
        z2i = 2.0 * x * y
        z4r = z2r * z2r - z2i * z2i
        z4i = 2.0 * z2r * z2i
        a = 6.0 * (z4r * x - z4i * y)
        b = 6.0 * (z4r * y + z4i * x)
        return (a, -b, b, a)
    elif pid == 1:
        # 3 z^2
        a = 3.0 * (x * x - y * y)
        b = 3.0 * (2.0 * x * y)
        return (a, -b, b, a)
    else:
        return (2.0 * x, 0.0, 0.0, 2.0 * y)


@cython.ccall
def eval_f(pid: cython.int, x: cython.double, y: cython.double) -> tuple:
    """Evaluate the built-in problem ``pid`` at (x, y)."""
    return _f(pid, x, y)


@cython.ccall
def eval_jac(pid: cython.int, x: cython.double, y: cython.double) -> tuple:
    """Row-major 2x2 Jacobian of the built-in problem ``pid`` at (x, y)."""
    return _jac(pid, x, y)


# ---------------------------------------------------------------------------
# 2x2 LU with partial pivoting
# ---------------------------------------------------------------------------

@cython.cfunc
def _lu2(a00: cython.double, a01: cython.double, a10: cython.double, a11: cython.double) -> tuple[cython.double, cython.double, cython.double, cython.double, cython.double, cython.double]:
    # returns (swapped, u00, u01, l10, u11, singular)
    nm: cython.double
    c0: cython.double
    c1: cython.double
    tol: cython.double
    tmp: cython.double
    swapped: cython.double
    singular: cython.double
    l10: cython.double
    u11: cython.double

    c0 = fabs(a00) + fabs(a10)
    c1 = fabs(a01) + fabs(a11)
    nm = c0 if c0 > c1 else c1  # 1-norm
    tol = PIVOT_RTOL * nm
    swapped = 0.0
    singular = 0.0
    if fabs(a10) > fabs(a00):
        tmp = a00
        a00 = a10
        a10 = tmp
        tmp = a01
        a01 = a11
        a11 = tmp
        swapped = 1.0
    if fabs(a00) <= tol:
        return (swapped, a00, a01, 0.0, a11, 1.0)
    l10 = a10 / a00
    u11 = a11 - l10 * a01
    if fabs(u11) <= tol:
        singular = 1.0
    return (swapped, a00, a01, l10, u11, singular)


@cython.cfunc
def _solve2(swapped: cython.double, u00: cython.double, u01: cython.double,
            l10: cython.double, u11: cython.double,
            b0: cython.double, b1: cython.double) -> tuple[cython.double, cython.double]:
    tmp: cython.double
    y1: cython.double
    x0: cython.double
    x1: cython.double
    if swapped != 0.0:
        tmp = b0
        b0 = b1
        b1 = tmp
    y1 = b1 - l10 * b0
    x1 = y1 / u11
    x0 = (b0 - u01 * x1) / u00
    return (x0, x1)


@cython.ccall
def lu2(a00: cython.double, a01: cython.double, a10: cython.double, a11: cython.double) -> tuple:
    """Partial-pivot LU of a 2x2 matrix.

    Returns ``(swapped, u00, u01, l10, u11, singular)`` with float 0/1
    flags; ``singular`` is set when a pivot falls below 1e-14 times the
    matrix 1-norm.
    """
    return _lu2(a00, a01, a10, a11)


@cython.ccall
def lu2_solve(swapped: cython.double, u00: cython.double, u01: cython.double,
              l10: cython.double, u11: cython.double,
              b0: cython.double, b1: cython.double) -> tuple:
    """Back-substitute a 2-vector through an :func:`lu2` factorization."""
    return _solve2(swapped, u00, u01, l10, u11, b0, b1)


# ---------------------------------------------------------------------------
# per-point adaptive solver
# ---------------------------------------------------------------------------

@cython.ccall
def solve_point(pid: cython.int, px: cython.double, py: cython.double,
                eps: cython.double, max_outer: cython.int,
                tau: cython.double, t_lower: cython.double,
                growth: cython.double, shrink: cython.double,
                simpl_eps: cython.double, max_sweeps: cython.int,
                switching: cython.bint, strict: cython.bint) -> tuple:
    """Run the full adaptive/simplified iteration from one start point.

    Returns ``(outcome, zx, zy, outer, sweeps, switched_at, f_evals,
    j_evals, factorizations)``.  ``switched_at`` is the 0-based index of
    the outer iteration whose certificate triggered the frozen phase, or
    -1.  ``tau`` may be +inf, which disables the step-size control.
    """
    x: cython.double
    y: cython.double
    f0: cython.double
    f1: cython.double
    j00: cython.double
    j01: cython.double
    j10: cython.double
    j11: cython.double
    sw: cython.double
    u00: cython.double
    u01: cython.double
    l10: cython.double
    u11: cython.double
    sing: cython.double
    d0: cython.double
    d1: cython.double
    alpha: cython.double
    prev_t: cython.double
    t: cython.double
    dev: cython.double
    xt0: cython.double
    xt1: cython.double
    tf0: cython.double
    tf1: cython.double
    tj00: cython.double
    tj01: cython.double
    tj10: cython.double
    tj11: cython.double
    tsw: cython.double
    tu00: cython.double
    tu01: cython.double
    tl10: cython.double
    tu11: cython.double
    tsing: cython.double
    F0: cython.double
    F1: cython.double
    xn0: cython.double
    xn1: cython.double
    fn0: cython.double
    fn1: cython.double
    Jn00: cython.double
    Jn01: cython.double
    Jn10: cython.double
    Jn11: cython.double
    xs_x: cython.double
    xs_y: cython.double
    Js00: cython.double
    Js01: cython.double
    Js10: cython.double
    Js11: cython.double
    hs_sw: cython.double
    hs_u00: cython.double
    hs_u01: cython.double
    hs_l10: cython.double
    hs_u11: cython.double
    s0: cython.double
    s1: cython.double
    den: cython.double
    snrm: cython.double
    mx: cython.double
    w0: cython.double
    w1: cython.double
    v0: cython.double
    v1: cython.double
    omega: cython.double
    base: cython.double
    disc: cython.double
    rguard: cython.double
    uu0: cython.double
    uu1: cython.double
    fu0: cython.double
    fu1: cython.double
    c0: cython.double
    c1: cython.double
    a: cython.double
    dd: cython.double
    k: cython.int
    js: cython.int
    cooldown: cython.int
    cdlen: cython.int
    sweeps_total: cython.int
    switched_at: cython.int
    guard_viol: cython.bint
    resumed_now: cython.bint
    fe: cython.long
    je: cython.long
    fc: cython.long

    fe = 0
    je = 0
    fc = 0
    sweeps_total = 0
    switched_at = -1
    cooldown = 0
    cdlen = 3

    x = px
    y = py
    f0, f1 = _f(pid, x, y)
    fe += 1
    if not (isfinite(f0) and isfinite(f1)):
        return (NON_FINITE, x, y, 0, 0, -1, fe, je, fc)
    j00, j01, j10, j11 = _jac(pid, x, y)
    je += 1
    sw, u00, u01, l10, u11, sing = _lu2(j00, j01, j10, j11)
    fc += 1
    if sing != 0.0:
        return (SINGULAR_ABORT, x, y, 0, 0, -1, fe, je, fc)
    d0, d1 = _solve2(sw, u00, u01, l10, u11, -f0, -f1)
    alpha = sqrt(d0 * d0 + d1 * d1)
    prev_t = 1.0
    xs_x = x
    xs_y = y
    Js00 = j00
    Js01 = j01
    Js10 = j10
    Js11 = j11
    hs_sw = sw
    hs_u00 = u00
    hs_u01 = u01
    hs_l10 = l10
    hs_u11 = u11

    for k in range(1, max_outer + 1):
        resumed_now = False
        if alpha <= eps:
            return (CONVERGED, x, y, k - 1, sweeps_total, switched_at, fe, je, fc)

        # --- step size (predictor/corrector; tau == inf means full steps)
        if tau == INFINITY:
            t = 1.0
        else:
            t = growth * prev_t
            if t > 1.0:
                t = 1.0
            while True:
                # gap between the damped step and the local Newton path:
                # 0.5 t |Ftilde(x + t d) - d|, Ftilde(y) = -J(y)^{-1} f(x)
                xt0 = x + t * d0
                xt1 = y + t * d1
                tj00, tj01, tj10, tj11 = _jac(pid, xt0, xt1)
                je += 1
                if not (isfinite(tj00) and isfinite(tj01) and isfinite(tj10) and isfinite(tj11)):
                    dev = INFINITY
                else:
                    tsw, tu00, tu01, tl10, tu11, tsing = _lu2(tj00, tj01, tj10, tj11)
                    fc += 1
                    if tsing != 0.0:
                        dev = INFINITY
                    else:
                        F0, F1 = _solve2(tsw, tu00, tu01, tl10, tu11, -f0, -f1)
                        dev = 0.5 * t * sqrt((F0 - d0) * (F0 - d0) + (F1 - d1) * (F1 - d1))
                if dev <= tau:
                    break
                if t <= t_lower:
                    t = t_lower
                    break
                t = t * shrink
                if t < t_lower:
                    t = t_lower

        # --- perform the step
        xn0 = x + t * d0
        xn1 = y + t * d1
        if not (isfinite(xn0) and isfinite(xn1)) or sqrt(xn0 * xn0 + xn1 * xn1) > DIVERGENCE_BOUND:
            return (NON_FINITE, xn0, xn1, k, sweeps_total, switched_at, fe, je, fc)
        fn0, fn1 = _f(pid, xn0, xn1)
        fe += 1
        if not (isfinite(fn0) and isfinite(fn1)):
            return (NON_FINITE, xn0, xn1, k, sweeps_total, switched_at, fe, je, fc)
        Jn00, Jn01, Jn10, Jn11 = _jac(pid, xn0, xn1)
        je += 1

        # --- Lipschitz estimate from the pair (x_s, x_new)
        s0 = xn0 - xs_x
        s1 = xn1 - xs_y
        den = s0 * s0 + s1 * s1
        snrm = sqrt(den)
        mx = sqrt(xs_x * xs_x + xs_y * xs_y)
        if mx < 1.0:
            mx = 1.0
        if snrm <= 1e-14 * mx:
            omega = INFINITY
        else:
            w0 = (Jn00 - Js00) * s0 + (Jn01 - Js01) * s1
            w1 = (Jn10 - Js10) * s0 + (Jn11 - Js11) * s1
            v0, v1 = _solve2(hs_sw, hs_u00, hs_u01, hs_l10, hs_u11, w0, w1)
            omega = sqrt(v0 * v0 + v1 * v1) / den

        # --- factorize at the new point (serves both phases)
        sw, u00, u01, l10, u11, sing = _lu2(Jn00, Jn01, Jn10, Jn11)
        fc += 1
        if sing != 0.0:
            return (SINGULAR_ABORT, xn0, xn1, k, sweeps_total, switched_at, fe, je, fc)

        # --- certified switch to the frozen-matrix phase (kappa = 0)
        if switching and cooldown == 0 and alpha * omega <= 0.5 * (1.0 - 0.0) * (1.0 - 0.0):
            switched_at = k - 1
            if omega == 0.0:
                rguard = INFINITY
            else:
                base = (1.0 - 0.0) / omega
                disc = base * base - 2.0 * alpha / omega
                if disc < 0.0:
                    disc = 0.0
                rguard = base + sqrt(disc)
            uu0 = xn0
            uu1 = xn1
            js = 0
            guard_viol = False
            while True:
                fu0, fu1 = _f(pid, uu0, uu1)
                fe += 1
                if not (isfinite(fu0) and isfinite(fu1)):
                    sweeps_total += js
                    return (NON_FINITE, uu0, uu1, k, sweeps_total, switched_at, fe, je, fc)
                c0, c1 = _solve2(sw, u00, u01, l10, u11, -fu0, -fu1)
                a = sqrt(c0 * c0 + c1 * c1)
                if a <= simpl_eps:
                    uu0 = uu0 + c0
                    uu1 = uu1 + c1
                    sweeps_total += js
                    return (CONVERGED, uu0, uu1, k, sweeps_total, switched_at, fe, je, fc)
                if js >= max_sweeps:
                    sweeps_total += js
                    return (MAX_ITERATIONS, uu0, uu1, k, sweeps_total, switched_at, fe, je, fc)
                uu0 = uu0 + c0
                uu1 = uu1 + c1
                js += 1
                dd = sqrt((uu0 - xn0) * (uu0 - xn0) + (uu1 - xn1) * (uu1 - xn1))
                if dd > rguard:
                    guard_viol = True
                    break
            # guard violated: certificate was too optimistic
            sweeps_total += js
            if strict:
                return (MAX_ITERATIONS, uu0, uu1, k, sweeps_total, switched_at, fe, je, fc)
            # resume the adaptive phase from the last iterate
            switched_at = -1
            xn0 = uu0
            xn1 = uu1
            if sqrt(xn0 * xn0 + xn1 * xn1) > DIVERGENCE_BOUND:
                return (NON_FINITE, xn0, xn1, k, sweeps_total, -1, fe, je, fc)
            fn0, fn1 = _f(pid, xn0, xn1)
            fe += 1
            if not (isfinite(fn0) and isfinite(fn1)):
                return (NON_FINITE, xn0, xn1, k, sweeps_total, -1, fe, je, fc)
            Jn00, Jn01, Jn10, Jn11 = _jac(pid, xn0, xn1)
            je += 1
            sw, u00, u01, l10, u11, sing = _lu2(Jn00, Jn01, Jn10, Jn11)
            fc += 1
            if sing != 0.0:
                return (SINGULAR_ABORT, xn0, xn1, k, sweeps_total, -1, fe, je, fc)
            cooldown = cdlen
            cdlen = cdlen * 2
            resumed_now = True

        # --- adaptive update
        x = xn0
        y = xn1
        f0 = fn0
        f1 = fn1
        d0, d1 = _solve2(sw, u00, u01, l10, u11, -f0, -f1)
        alpha = sqrt(d0 * d0 + d1 * d1)
        xs_x = x
        xs_y = y
        Js00 = Jn00
        Js01 = Jn01
        Js10 = Jn10
        Js11 = Jn11
        hs_sw = sw
        hs_u00 = u00
        hs_u01 = u01
        hs_l10 = l10
        hs_u11 = u11
        prev_t = t
        if cooldown > 0 and not resumed_now:
            cooldown -= 1

    return (MAX_ITERATIONS, x, y, max_outer, sweeps_total, switched_at, fe, je, fc)


@cython.ccall
def scan_grid(pid: cython.int, xs, ys, row0: cython.int, row1: cython.int,
              eps: cython.double, max_outer: cython.int,
              tau: cython.double, t_lower: cython.double,
              growth: cython.double, shrink: cython.double,
              simpl_eps: cython.double, max_sweeps: cython.int,
              switching: cython.bint, strict: cython.bint,
              out_outcome, out_zx, out_zy, out_outer, out_switched) -> tuple:
    """Solve every lattice point in rows [row0, row1).

    ``xs``/``ys`` are 1-D float64 coordinate arrays; the ``out_*`` arrays
    are (ny, nx) and are filled in place.  Returns accumulated
    ``(f_evals, j_evals, factorizations)`` counters.
    """
    cxs: cython.double[::1] = xs
    cys: cython.double[::1] = ys
    coutcome: cython.char[:, ::1] = out_outcome
    czx: cython.double[:, ::1] = out_zx
    czy: cython.double[:, ::1] = out_zy
    couter: cython.int[:, ::1] = out_outer
    cswitched: cython.int[:, ::1] = out_switched
    i: cython.int
    j: cython.int
    nx: cython.int
    fe: cython.long
    je: cython.long
    fc: cython.long

    nx = len(xs)
    fe = 0
    je = 0
    fc = 0
    for i in range(row0, row1):
        for j in range(nx):
            res = solve_point(pid, cxs[j], cys[i], eps, max_outer, tau, t_lower,
                              growth, shrink, simpl_eps, max_sweeps, switching, strict)
            coutcome[i, j] = res[0]
            czx[i, j] = res[1]
            czy[i, j] = res[2]
            couter[i, j] = res[3]
            cswitched[i, j] = res[5]
            fe += res[6]
            je += res[7]
            fc += res[8]
    return (fe, je, fc)
