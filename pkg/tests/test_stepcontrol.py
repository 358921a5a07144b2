"""Predictor/corrector step-size control."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import newton_switch as ns
from newton_switch.kernel import Correction, Counters
from newton_switch.problems import scalar_problem
from newton_switch.stepcontrol import (StepControllerConfig, StepDecision,
                                       propose_step)


def newton_correction(problem, x):
    fx = problem.eval_f(x)
    h = ns.factorize(problem.eval_jacobian(x))
    d = h.solve(-fx)
    return fx, Correction(d, float(np.linalg.norm(d)))


@pytest.fixture
def linear2():
    a = np.array([[3.0, 1.0], [0.0, 2.0]])
    return ns.Problem(name="affine", dim=2,
                      f=lambda x: a @ x - np.array([1.0, 1.0]),
                      jacobian=lambda x: a)


def test_config_validation():
    with pytest.raises(ValueError):
        StepControllerConfig(t_lower=0.0)
    with pytest.raises(ValueError):
        StepControllerConfig(t_lower=1.5)
    with pytest.raises(ValueError):
        StepControllerConfig(growth=1.0)
    with pytest.raises(ValueError):
        StepControllerConfig(shrink=1.0)
    with pytest.raises(ValueError):
        StepControllerConfig(tau=0.0)
    StepControllerConfig(tau=math.inf)  # disabled control is legal


def test_tau_infinity_always_full_step(z6m1):
    cfg = StepControllerConfig(tau=math.inf)
    fx, corr = newton_correction(z6m1, np.array([0.11, 0.13]))
    dec = propose_step(z6m1, [0.11, 0.13], fx, corr, prev_t=1e-6, cfg=cfg)
    assert dec == StepDecision(t=1.0, deviation_estimate=0.0, corrector_rounds=0)


def test_linear_problem_deviation_is_zero(linear2):
    # constant Jacobian: the damped step lies exactly on the local path
    cfg = StepControllerConfig()
    x = np.array([5.0, -3.0])
    fx, corr = newton_correction(linear2, x)
    dec = propose_step(linear2, x, fx, corr, prev_t=0.25, cfg=cfg)
    assert dec.deviation_estimate == 0.0
    assert dec.t == pytest.approx(0.5)  # min(1, growth * prev_t)
    assert dec.corrector_rounds == 0


def test_predictor_caps_at_one(linear2):
    cfg = StepControllerConfig()
    x = np.array([1.0, 1.0])
    fx, corr = newton_correction(linear2, x)
    assert propose_step(linear2, x, fx, corr, prev_t=0.9, cfg=cfg).t == 1.0


def test_near_singular_point_shrinks(z6m1):
    # by the origin the Jacobian varies violently; full steps must be refused
    cfg = StepControllerConfig()
    x = np.array([0.1, 0.1])
    fx, corr = newton_correction(z6m1, x)
    dec = propose_step(z6m1, x, fx, corr, prev_t=1.0, cfg=cfg)
    assert dec.t < 1.0
    assert dec.deviation_estimate <= cfg.tau or dec.forced


def test_accepted_deviation_verified_post_hoc(z6m1):
    # re-evaluate the deviation formula independently at the returned t
    cfg = StepControllerConfig()
    rng = np.random.default_rng(5)
    checked = 0
    for _ in range(30):
        x = rng.uniform(-2.5, 2.5, 2)
        if np.linalg.norm(x) < 0.05:
            continue
        fx, corr = newton_correction(z6m1, x)
        dec = propose_step(z6m1, x, fx, corr, prev_t=1.0, cfg=cfg)
        if dec.forced:
            continue
        y = x + dec.t * corr.delta
        h = ns.factorize(z6m1.eval_jacobian(y))
        if h.singular:
            continue
        dev = 0.5 * dec.t * float(np.linalg.norm(h.solve(-fx) - corr.delta))
        assert dev == pytest.approx(dec.deviation_estimate, rel=1e-12)
        assert dev <= cfg.tau
        checked += 1
    assert checked > 10


def test_forced_at_t_lower(z6m1):
    cfg = StepControllerConfig(t_lower=1.0 / 64.0)
    x = np.array([0.2, 0.05])  # needs t far below 1/64
    fx, corr = newton_correction(z6m1, x)
    dec = propose_step(z6m1, x, fx, corr, prev_t=1.0, cfg=cfg)
    assert dec.forced
    assert dec.t == cfg.t_lower


def test_strict_step_collapse(z6m1):
    cfg = StepControllerConfig(t_lower=1.0 / 64.0)
    x = np.array([0.2, 0.05])
    fx, corr = newton_correction(z6m1, x)
    with pytest.raises(ns.StepCollapse):
        propose_step(z6m1, x, fx, corr, prev_t=1.0, cfg=cfg, strict=True)


@pytest.mark.filterwarnings("ignore::scipy.linalg.LinAlgWarning")
def test_singular_trial_point_repels():
    # from x=1 on f=x^2+1 the full Newton step lands exactly on the
    # singular point x=0; the corrector must halve past it
    p = scalar_problem("shifted", lambda x: x * x + 1.0, lambda x: 2.0 * x)
    x = np.array([1.0])
    fx, corr = newton_correction(p, x)  # delta = -1
    cfg = StepControllerConfig(tau=1e30)  # accept anything non-singular
    dec = propose_step(p, x, fx, corr, prev_t=1.0, cfg=cfg)
    assert dec.t == 0.5
    assert dec.corrector_rounds == 1
    assert not dec.forced


@given(prev_t=st.floats(min_value=1e-6, max_value=1.0))
@settings(max_examples=60, deadline=None)
def test_t_always_in_bounds(prev_t):
    p = ns.get_problem("z6m1")
    cfg = StepControllerConfig()
    x = np.array([1.7, -0.6])
    fx = p.eval_f(x)
    h = ns.factorize(p.eval_jacobian(x))
    d = h.solve(-fx)
    corr = Correction(d, float(np.linalg.norm(d)))
    dec = propose_step(p, x, fx, corr, prev_t=prev_t, cfg=cfg)
    assert cfg.t_lower <= dec.t <= 1.0


def test_counters_count_trial_factorizations(z6m1):
    cfg = StepControllerConfig()
    x = np.array([0.4, 0.9])
    fx, corr = newton_correction(z6m1, x)
    c = Counters()
    dec = propose_step(z6m1, x, fx, corr, prev_t=1.0, cfg=cfg, counters=c)
    assert c.j_evals == dec.corrector_rounds + 1
    assert c.factorizations == dec.corrector_rounds + 1
    assert c.f_evals == 0  # the trial reuses the current residual
