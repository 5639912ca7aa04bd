"""Adaptive solver: accuracy, step control, hooks, cascade enrichment."""

import math

import numpy as np
import pytest

from morphring import (
    Diagnostics,
    FrozenAxes,
    IntegratorConfig,
    RadiusPolicy,
    RingParams,
    StepUnderflowError,
    Trajectory,
    TumbleCascade,
    integrate,
    integrate_cascade,
)


def _decay(t, x):
    return -x


def _oscillator(t, x):
    return np.array([x[1], -x[0]])


# ---------------------------------------------------------------------------
# config and container validation


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(rel_tol=1e-2)  # looser than the solver supports
    with pytest.raises(ValueError):
        IntegratorConfig(abs_tol=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(max_step=0.0)


def test_trajectory_validation():
    diag = Diagnostics(n_steps=1, n_rejected=0, n_rhs=7)
    t = np.array([0.0, 1.0])
    x = np.zeros((2, 3))
    Trajectory(times=t, states=x, diagnostics=diag)
    with pytest.raises(ValueError):
        Trajectory(times=np.array([0.0, 1.0, 2.0]), states=x, diagnostics=diag)
    with pytest.raises(ValueError):
        Trajectory(times=np.array([0.0, 0.0]), states=x, diagnostics=diag)
    with pytest.raises(ValueError):
        Trajectory(times=t, states=x, diagnostics=diag, inertias=())


def test_integrate_input_validation():
    cfg = IntegratorConfig()
    with pytest.raises(ValueError):
        integrate(_decay, [1.0], (1.0, 0.0), cfg)
    with pytest.raises(ValueError):
        integrate(_decay, [[1.0, 2.0]], (0.0, 1.0), cfg)
    with pytest.raises(ValueError):
        integrate(_decay, [1.0], (0.0, 1.0), cfg, t_eval=np.array([0.5, 0.25]))
    with pytest.raises(ValueError):
        integrate(_decay, [1.0], (0.0, 1.0), cfg, t_eval=np.array([0.5, 1.5]))
    with pytest.raises(ValueError):
        integrate(lambda t, x: np.zeros(2), [1.0], (0.0, 1.0), cfg)


# ---------------------------------------------------------------------------
# accuracy


def test_exponential_decay_accuracy():
    cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)
    traj = integrate(_decay, [1.0], (0.0, 5.0), cfg)
    assert traj.times[-1] == 5.0
    assert traj.states[-1, 0] == pytest.approx(math.exp(-5.0), rel=1e-9)


def test_oscillator_energy_over_100_periods():
    cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)
    T = 200 * math.pi
    traj = integrate(_oscillator, [1.0, 0.0], (0.0, T), cfg)
    e = traj.states[:, 0] ** 2 + traj.states[:, 1] ** 2
    assert float(np.max(np.abs(e - 1.0))) < 1e-6
    assert traj.states[-1, 0] == pytest.approx(1.0, abs=1e-6)


def test_endpoint_error_shrinks_at_least_fourth_order():
    """Step-halving study with the controller pinned by max_step.

    Tolerances are opened wide so every step is accepted at exactly
    max_step; the endpoint error of x' = x cos t must then fall by at
    least 2^4 per halving (the pair's lower order), and in practice
    close to 2^5.
    """

    def rhs(t, x):
        return x * math.cos(t)

    exact = math.exp(math.sin(2.0))
    errs = []
    for h in (0.1, 0.05, 0.025):
        cfg = IntegratorConfig(rel_tol=1e-3, abs_tol=1e6, max_step=h)
        traj = integrate(rhs, [1.0], (0.0, 2.0), cfg)
        assert traj.diagnostics.n_rejected == 0
        errs.append(abs(traj.states[-1, 0] - exact))
    assert errs[0] / errs[1] > 16
    assert errs[1] / errs[2] > 16


def test_zero_rhs_takes_max_step_strides():
    cfg = IntegratorConfig(max_step=2.5)
    traj = integrate(lambda t, x: np.zeros_like(x), [0.7, -0.2], (0.0, 10.0), cfg)
    np.testing.assert_array_equal(traj.times, [0.0, 2.5, 5.0, 7.5, 10.0])
    for row in traj.states:
        np.testing.assert_array_equal(row, [0.7, -0.2])
    assert traj.diagnostics.n_steps == 4
    assert traj.diagnostics.n_rejected == 0


def test_runs_are_bit_deterministic():
    def rhs(t, x):
        return np.array([x[1], (1 - x[0] ** 2) * x[1] - x[0]])

    cfg = IntegratorConfig(rel_tol=1e-9, abs_tol=1e-11)
    a = integrate(rhs, [2.0, 0.0], (0.0, 10.0), cfg)
    b = integrate(rhs, [2.0, 0.0], (0.0, 10.0), cfg)
    assert np.array_equal(a.times, b.times)
    assert np.array_equal(a.states, b.states)
    assert a.diagnostics == b.diagnostics


# ---------------------------------------------------------------------------
# sampling and dense output


def test_t_eval_lands_exactly():
    cfg = IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10)
    t_eval = np.linspace(0.0, 5.0, 101)
    traj = integrate(_decay, [1.0], (0.0, 5.0), cfg, t_eval=t_eval)
    assert np.array_equal(traj.times, t_eval)  # bitwise, not approx
    np.testing.assert_allclose(
        traj.states[:, 0], np.exp(-t_eval), rtol=1e-7, atol=1e-12
    )


def test_t_eval_subinterval_excludes_start():
    cfg = IntegratorConfig()
    t_eval = np.array([1.0, 2.0, 3.0])
    traj = integrate(_decay, [1.0], (0.0, 4.0), cfg, t_eval=t_eval)
    assert np.array_equal(traj.times, t_eval)


def test_dense_output_endpoint_exact_and_midstep_accurate():
    cfg = IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10, dense_output=True)
    traj = integrate(_decay, [1.0], (0.0, 5.0), cfg)
    assert traj.dense is not None
    for i in (0, len(traj) // 2, len(traj) - 1):
        np.testing.assert_array_equal(traj.dense(traj.times[i]), traj.states[i])
    rng = np.random.default_rng(2)
    ts = rng.uniform(0.0, 5.0, 50)
    vals = traj.dense(ts)
    np.testing.assert_allclose(vals[:, 0], np.exp(-ts), atol=1e-4)
    with pytest.raises(ValueError):
        traj.dense(5.0001)
    with pytest.raises(ValueError):
        traj.dense(-0.0001)


def test_dense_output_absent_by_default():
    traj = integrate(_decay, [1.0], (0.0, 1.0), IntegratorConfig())
    assert traj.dense is None


# ---------------------------------------------------------------------------
# hooks and failure paths


def test_hooks_see_every_accepted_step_and_only_those():
    calls = []

    def hook(t, x):
        calls.append((t, x.copy()))

    def rhs(t, x):
        return np.array([math.sin(t**3)])  # chirp: timescale keeps shrinking

    cfg = IntegratorConfig(rel_tol=1e-6, abs_tol=1e-8, invariant_hooks=(hook,))
    traj = integrate(rhs, [0.1], (0.0, 6.0), cfg)
    assert traj.diagnostics.n_rejected > 0  # the problem must exercise control
    assert len(calls) == traj.diagnostics.n_steps
    np.testing.assert_array_equal([c[0] for c in calls], traj.times[1:])
    for (tc, xc), row in zip(calls, traj.states[1:]):
        np.testing.assert_array_equal(xc, row)


def test_hook_exception_aborts_integration():
    def hook(t, x):
        if t > 0.5:
            raise RuntimeError("invariant broken")

    cfg = IntegratorConfig(invariant_hooks=(hook,))
    with pytest.raises(RuntimeError, match="invariant broken"):
        integrate(_decay, [1.0], (0.0, 2.0), cfg)


def test_rhs_exception_propagates():
    def rhs(t, x):
        if t > 0.3:
            raise ZeroDivisionError("model blew up")
        return -x

    with pytest.raises(ZeroDivisionError):
        integrate(rhs, [1.0], (0.0, 1.0), IntegratorConfig())


def test_step_underflow_on_a_violent_discontinuity():
    def rhs(t, x):
        return np.array([0.0 if t < 0.5 else 1e16])

    with pytest.raises(StepUnderflowError) as exc:
        integrate(rhs, [0.0], (0.0, 1.0), IntegratorConfig())
    assert exc.value.time == pytest.approx(0.5, abs=1e-6)


def test_rhs_call_count_reflects_fsal_reuse():
    cfg = IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10)
    traj = integrate(_oscillator, [1.0, 0.0], (0.0, 20.0), cfg)
    d = traj.diagnostics
    # 6 fresh stages per attempted step plus the startup probes
    assert d.n_rhs <= 6 * (d.n_steps + d.n_rejected) + 3
    assert d.n_rhs >= 6 * d.n_steps


# ---------------------------------------------------------------------------
# cascade integration


def _upright_circle_cascade():
    params = RingParams(
        mass=1.0, perimeter=2.0, radius_policy=RadiusPolicy.MEAN_RADIUS
    )
    R = 2.0 / (2 * math.pi)
    return TumbleCascade(params, FrozenAxes(R, R)), R


def test_cascade_run_is_enriched_and_conservative():
    cascade, R = _upright_circle_cascade()
    x0 = [0.0, 0.5, 2 * math.pi, 0.0, math.pi / 2, 0.0, 0.0, 0.0]
    cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)
    t_eval = np.linspace(0.0, 2.0, 201)
    traj = integrate_cascade(cascade, x0, (0.0, 2.0), cfg, t_eval=t_eval)
    n = len(traj)
    assert np.array_equal(traj.times, t_eval)
    assert len(traj.postures) == n and len(traj.inertias) == n
    assert traj.diagnostics.residuals.shape == (n,)
    assert traj.diagnostics.energies.shape == (n,)
    assert float(np.max(traj.diagnostics.residuals)) < 1e-10
    e = traj.diagnostics.energies
    assert float(np.max(np.abs(e - e[0]))) / abs(e[0]) < 1e-9
    # frozen circle: every sampled posture carries the same axes
    for p in traj.postures:
        assert p.xi5 == pytest.approx(R, rel=1e-12)
        assert p.xi6 == pytest.approx(R, rel=1e-12)
    for y in traj.inertias:
        assert y.y1 == pytest.approx(y.y3, rel=1e-12)


def test_cascade_geometry_at_frozen_axes():
    cascade, R = _upright_circle_cascade()
    a, b, y, r = cascade.geometry_at(1.3, spin=0.7)
    assert a == R and b == R
    assert r == pytest.approx(2.0 / (2 * math.pi), rel=1e-12)
    assert y.perpendicular_defect() < 1e-15 * y.y2


def test_cascade_call_matches_posture_slaved_rhs():
    cascade, R = _upright_circle_cascade()
    x = np.array([0.1, 0.4, 6.0, 0.2, 1.2, 0.5, 0.0, 0.0])
    dx = cascade(0.7, x)
    assert dx.shape == (8,)
    assert np.all(np.isfinite(dx))
    assert cascade.residual(0.7, x) < 1e-12
    assert math.isfinite(cascade.energy(0.7, x))
