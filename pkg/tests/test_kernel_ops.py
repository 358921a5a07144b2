"""Correction and simplified-iteration primitives."""

import numpy as np
import pytest

import newton_switch as ns
from newton_switch.kernel import Counters, correction, simplified_iterate
from newton_switch.problems import scalar_problem


@pytest.fixture
def square():
    # f(x) = x^2 - 1, zeros at +-1
    return scalar_problem("square", lambda x: x * x - 1.0, lambda x: 2.0 * x,
                          zeros=(1.0, -1.0))


def frozen_handle(problem, x):
    return ns.factorize(problem.eval_jacobian(x))


def test_counters_snapshot_is_independent():
    c = Counters(1, 2, 3)
    s = c.snapshot()
    c.f_evals = 99
    assert (s.f_evals, s.j_evals, s.factorizations) == (1, 2, 3)


def test_correction_newton_step(square):
    h = frozen_handle(square, [2.0])
    c = Counters()
    corr = correction(square, [2.0], h, counters=c)
    # delta = -(4-1)/4
    assert corr.delta == pytest.approx([-0.75])
    assert corr.alpha == pytest.approx(0.75)
    assert c.f_evals == 1


def test_correction_nonfinite(square):
    bad = scalar_problem("bad", lambda x: float("nan"), lambda x: 1.0)
    h = ns.factorize(np.eye(1))
    with pytest.raises(ns.NonFiniteValue):
        correction(bad, [0.0], h)


class TestSimplifiedIterate:
    def test_converges_to_unit_root(self, square):
        # frozen M = f'(1.2) = 2.4; contraction toward 1.0
        h = frozen_handle(square, [1.2])
        run = simplified_iterate(square, [1.2], h, eps=1e-12)
        assert run.converged
        assert run.point == pytest.approx([1.0], abs=1e-11)
        assert run.iterations == len(run.residual_history)
        # residuals decay monotonically for this contraction
        hist = run.residual_history
        assert all(b < a for a, b in zip(hist, hist[1:]))

    def test_start_at_zero_counts_zero_sweeps(self, square):
        h = frozen_handle(square, [1.0])
        run = simplified_iterate(square, [1.0], h, eps=1e-10)
        assert run.converged
        assert run.iterations == 0
        assert run.residual_history == []
        assert run.point == pytest.approx([1.0], abs=1e-15)

    def test_single_sweep_example(self, square):
        # pick eps so exactly one correction exceeds it
        h = frozen_handle(square, [1.2])
        full = simplified_iterate(square, [1.2], h, eps=1e-12)
        eps = (full.residual_history[0] + full.residual_history[1]) / 2.0
        run = simplified_iterate(square, [1.2], h, eps=eps)
        assert run.converged
        assert run.iterations == 1

    def test_sweep_budget(self, square):
        h = frozen_handle(square, [1.2])
        run = simplified_iterate(square, [1.2], h, eps=1e-12, max_sweeps=2)
        assert not run.converged
        assert run.iterations == 2

    def test_guard_violation_carries_partial_result(self, square):
        h = frozen_handle(square, [1.2])
        with pytest.raises(ns.GuardViolation) as exc:
            simplified_iterate(square, [1.2], h, eps=1e-12, guard_radius=1e-3)
        partial = exc.value.result
        assert not partial.converged
        assert partial.iterations == 1
        assert abs(partial.point[0] - 1.2) > 1e-3

    def test_iterates_stay_inside_certified_ball(self, square):
        # x_n = 1.2, M = 2.4: alpha = 11/60, omega = 5/6 -> R = 2.2
        h = frozen_handle(square, [1.2])
        run = simplified_iterate(square, [1.2], h, eps=1e-12, guard_radius=2.2)
        assert run.converged  # guard never fires on a sound certificate
        assert abs(run.point[0] - 1.2) <= 2.2

    def test_divergent_frozen_matrix(self, square):
        # frozen M with the wrong sign pushes iterates away until the guard
        h = ns.factorize(np.array([[-0.5]]))
        with pytest.raises(ns.GuardViolation):
            simplified_iterate(square, [1.2], h, eps=1e-12, guard_radius=10.0,
                               max_sweeps=500)

    def test_counters(self, square):
        h = frozen_handle(square, [1.2])
        c = Counters()
        run = simplified_iterate(square, [1.2], h, eps=1e-12, counters=c)
        assert c.f_evals == run.iterations + 1  # final sub-eps sweep also evaluates
        assert c.j_evals == 0
        assert c.factorizations == 0

    def test_bad_args(self, square):
        h = frozen_handle(square, [1.2])
        with pytest.raises(ValueError):
            simplified_iterate(square, [1.2], h, eps=0.0)
        with pytest.raises(ValueError):
            simplified_iterate(square, [1.2], h, eps=1e-10, guard_radius=0.0)
