"""Adaptive explicit Runge-Kutta integration and the cascade runner.

The solver is a Dormand-Prince 5(4) pair with proportional-integral step
control, a step-doubling-free embedded error estimate, first-same-as-last
stage reuse, and cubic Hermite dense output on each accepted step. It is
deliberately free of platform-dependent branches: the same inputs produce
bit-identical trajectories on every run.

``t_eval`` forces accepted steps to land exactly on the requested sample
times, so sampled values carry the solver's full order rather than the
interpolant's. Dense output (when enabled) is the order-3 Hermite cubic
built from stored endpoint states and slopes; it reproduces the stored
endpoints exactly by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import StepUnderflowError
from .geometry import (
    AxisSchedule,
    InertiaTriple,
    PostureState,
    RadiusPolicy,
    RingParams,
    inertia_triple,
    posture_from_axes,
)
from .tumbling import (
    SlopeModel,
    contact_radius,
    forcing_vector,
    mass_matrix,
    mechanical_energy,
    tumble_rhs,
)

__all__ = [
    "IntegratorConfig",
    "Diagnostics",
    "DenseOutput",
    "Trajectory",
    "integrate",
    "TumbleCascade",
    "integrate_cascade",
]

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_E = _B5 - _B4

_MIN_STEP = 1e-12
_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 10.0
# PI exponents for a 5th-order error estimate
_ALPHA = 0.17
_BETA = 0.04


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerance and output settings for the adaptive solver.

    invariant_hooks are callables (t, x) -> None invoked after every
    accepted step; raising from a hook aborts the integration with that
    exception. Hooks are part of the step sequence contract, not a
    debugging afterthought, so they see exactly the accepted states.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step: float = math.inf
    dense_output: bool = False
    invariant_hooks: Sequence[Callable[[float, np.ndarray], None]] = ()

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-3):
            raise ValueError("rel_tol must lie in (0, 1e-3]")
        if self.abs_tol <= 0.0:
            raise ValueError("abs_tol must be positive")
        if self.max_step <= 0.0:
            raise ValueError("max_step must be positive")


@dataclass(frozen=True)
class Diagnostics:
    """Counters plus optional per-sample series aligned with times."""

    n_steps: int
    n_rejected: int
    n_rhs: int
    residuals: np.ndarray | None = None
    energies: np.ndarray | None = None


class DenseOutput:
    """Piecewise cubic Hermite interpolant over the accepted steps."""

    def __init__(self, ts: np.ndarray, xs: np.ndarray, fs: np.ndarray):
        self._ts = ts
        self._xs = xs
        self._fs = fs

    def __call__(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty((t_arr.size, self._xs.shape[1]))
        for i, ti in enumerate(t_arr):
            out[i] = self._eval(ti)
        return out[0] if np.isscalar(t) or np.asarray(t).ndim == 0 else out

    def _eval(self, t: float) -> np.ndarray:
        ts = self._ts
        if t < ts[0] or t > ts[-1]:
            raise ValueError(f"t={t} outside the integrated span [{ts[0]}, {ts[-1]}]")
        j = int(np.searchsorted(ts, t, side="right") - 1)
        j = min(max(j, 0), len(ts) - 2)
        h = ts[j + 1] - ts[j]
        s = (t - ts[j]) / h
        x0, x1 = self._xs[j], self._xs[j + 1]
        f0, f1 = self._fs[j], self._fs[j + 1]
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return h00 * x0 + h * h10 * f0 + h01 * x1 + h * h11 * f1


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of one integration run.

    times and states always align; postures and inertias are filled by
    cascade runs and are None for bare ODE problems. diagnostics carries
    step counters and, for cascade runs, per-sample dynamics residuals
    and mechanical energy.
    """

    times: np.ndarray
    states: np.ndarray
    diagnostics: Diagnostics
    postures: tuple[PostureState, ...] | None = None
    inertias: tuple[InertiaTriple, ...] | None = None
    dense: DenseOutput | None = None

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states must have equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        for name in ("postures", "inertias"):
            seq = getattr(self, name)
            if seq is not None and len(seq) != len(self.times):
                raise ValueError(f"{name} must align with times")

    def __len__(self) -> int:
        return len(self.times)


def _error_norm(err: np.ndarray, x0: np.ndarray, x1: np.ndarray, cfg) -> float:
    sc = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(x0), np.abs(x1))
    with np.errstate(all="ignore"):
        v = err / sc
        n = math.sqrt(float(np.mean(v * v)))
    return n if math.isfinite(n) else math.inf


def _initial_step(rhs, t0, x0, f0, tf, cfg) -> tuple[float, int]:
    """Hairer-style first step guess.

    When both curvature probes vanish the right-hand side is locally
    constant and any step integrates it exactly, so the guess jumps
    straight to the largest step the caller allows.
    """
    span = tf - t0
    biggest = min(cfg.max_step, span)
    sc = cfg.abs_tol + cfg.rel_tol * np.abs(x0)
    d0 = math.sqrt(float(np.mean((x0 / sc) ** 2)))
    d1 = math.sqrt(float(np.mean((f0 / sc) ** 2)))
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, biggest)
    f1 = rhs(t0 + h0, x0 + h0 * f0)
    d2 = math.sqrt(float(np.mean(((np.asarray(f1) - f0) / sc) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        return biggest, 1
    h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1, biggest), 1


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    x0,
    t_span: tuple[float, float],
    cfg: IntegratorConfig,
    t_eval: np.ndarray | None = None,
) -> Trajectory:
    """Integrate x' = rhs(t, x) over t_span with adaptive steps.

    Without t_eval, every accepted step endpoint is a sample. With
    t_eval (strictly increasing, inside the span), steps are shortened to
    land exactly on each requested time and only those are sampled.

    Raises StepUnderflowError if error control drives the step below
    1e-12 s, and propagates any exception the rhs or a hook raises.
    """
    t0, tf = float(t_span[0]), float(t_span[1])
    if not tf > t0:
        raise ValueError("t_span must satisfy t_end > t_start")
    x = np.array(x0, dtype=float)
    if x.ndim != 1:
        raise ValueError("state must be a 1-d vector")

    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        if t_eval.ndim != 1 or t_eval.size == 0:
            raise ValueError("t_eval must be a nonempty 1-d array")
        if np.any(np.diff(t_eval) <= 0):
            raise ValueError("t_eval must be strictly increasing")
        if t_eval[0] < t0 or t_eval[-1] > tf:
            raise ValueError("t_eval must lie inside t_span")

    n_rhs = 0

    def call(t, xx):
        nonlocal n_rhs
        n_rhs += 1
        return np.asarray(rhs(t, xx), dtype=float)

    f = call(t0, x)
    if f.shape != x.shape:
        raise ValueError("rhs shape does not match the state")
    h, _ = _initial_step(call, t0, x, f, tf, cfg)

    times = [t0]
    states = [x.copy()]
    if t_eval is not None:
        times, states = [], []
        eval_idx = 0
        if t_eval[0] == t0:
            times.append(t0)
            states.append(x.copy())
            eval_idx = 1
    dense_t = [t0]
    dense_x = [x.copy()]
    dense_f = [f.copy()]

    t = t0
    err_prev = 1e-4
    n_steps = 0
    n_rejected = 0
    k = np.empty((7, x.size))

    while t < tf:
        # next hard landing point: a requested sample time or the end
        if t_eval is not None and eval_idx < t_eval.size:
            target = float(t_eval[eval_idx])
        else:
            target = tf
        remaining = target - t
        h_use = min(h, cfg.max_step, remaining)
        landed = h_use == remaining
        if h_use < _MIN_STEP:
            raise StepUnderflowError(t, states[-1] if states else x.copy(), h_use)

        k[0] = f
        for i in range(1, 6):
            k[i] = call(t + _C[i] * h_use, x + h_use * (k[:i].T @ _A[i]))
        x_new = x + h_use * (k[:6].T @ _A[6])  # the b5 row equals the a7 row
        k[6] = call(t + h_use, x_new)  # first-same-as-last stage
        err_vec = h_use * (k.T @ _E)
        err = _error_norm(err_vec, x, x_new, cfg)

        if err <= 1.0:
            n_steps += 1
            t, x, f = (target if landed else t + h_use), x_new, k[6].copy()
            if t_eval is None:
                times.append(t)
                states.append(x.copy())
            elif eval_idx < t_eval.size and t == t_eval[eval_idx]:
                times.append(t)
                states.append(x.copy())
                eval_idx += 1
            dense_t.append(t)
            dense_x.append(x.copy())
            dense_f.append(f.copy())
            for hook in cfg.invariant_hooks:
                hook(t, x)
            if err == 0.0:
                fac = _FAC_MAX
            else:
                fac = _SAFETY * err ** (-_ALPHA) * err_prev**_BETA
                fac = min(_FAC_MAX, max(_FAC_MIN, fac))
            h = h_use * fac
            err_prev = max(err, 1e-10)
        else:
            n_rejected += 1
            fac = max(_FAC_MIN, _SAFETY * err**-0.2)
            h = h_use * min(1.0, fac)
            if h < _MIN_STEP:
                raise StepUnderflowError(t, x.copy(), h)

    dense = None
    if cfg.dense_output:
        dense = DenseOutput(
            np.array(dense_t), np.array(dense_x), np.array(dense_f)
        )
    diag = Diagnostics(n_steps=n_steps, n_rejected=n_rejected, n_rhs=n_rhs)
    return Trajectory(
        times=np.array(times), states=np.array(states), diagnostics=diag, dense=dense
    )


# ---------------------------------------------------------------------------
# cascade: posture schedule -> inertia triple -> tumbling dynamics


class TumbleCascade:
    """Right-hand side of the full shape-to-tumbling cascade.

    Per evaluation: the axis schedule gives (a, b) at time t, the inertia
    triple comes from quadrature memoized on the axes rounded to 1e-12 m,
    the contact radius follows the configured policy, and the tumbling
    dynamics produce the packed state derivative. Instances carry only
    caches and are cheap, but are not meant to be shared across threads.
    """

    def __init__(
        self,
        params: RingParams,
        schedule: AxisSchedule,
        slope_model: SlopeModel = SlopeModel.EXTENDED,
    ):
        self.params = params
        self.schedule = schedule
        self.slope_model = slope_model
        self._inertia_cache: dict[tuple[int, int], InertiaTriple] = {}

    def geometry_at(self, t: float, spin: float) -> tuple[float, float, InertiaTriple, float]:
        """(a, b, inertia, contact radius) at time t and spin angle."""
        a, b = self.schedule.axes(t)
        key = (round(a / 1e-12), round(b / 1e-12))
        y = self._inertia_cache.get(key)
        if y is None:
            y = inertia_triple(a, b, self.params)
            self._inertia_cache[key] = y
        r = contact_radius(
            a, b, spin, self.params.radius_policy, perimeter=self.params.perimeter
        )
        return a, b, y, r

    def __call__(self, t: float, x: np.ndarray) -> np.ndarray:
        a, b, y, r = self.geometry_at(t, float(x[5]))
        return tumble_rhs(x, y, self.params, r, self.slope_model)

    def residual(self, t: float, x: np.ndarray) -> float:
        """Linear-solve residual ||M xdot - N||_inf at (t, x)."""
        from .tumbling import TumbleState

        a, b, y, r = self.geometry_at(t, float(x[5]))
        xdot = tumble_rhs(x, y, self.params, r, self.slope_model)
        st = TumbleState.from_array(x)
        M = mass_matrix(st, y, self.params.mass, r)
        N = forcing_vector(st, y, self.params, r, self.slope_model)
        return float(np.max(np.abs(M @ xdot - N)))

    def energy(self, t: float, x: np.ndarray) -> float:
        a, b, y, r = self.geometry_at(t, float(x[5]))
        return mechanical_energy(x, y, self.params, r, self.slope_model)

    def posture(self, t: float) -> PostureState:
        a, b = self.schedule.axes(t)
        return posture_from_axes(a, b)


def integrate_cascade(
    cascade: TumbleCascade,
    x0,
    t_span: tuple[float, float],
    cfg: IntegratorConfig,
    t_eval: np.ndarray | None = None,
) -> Trajectory:
    """Run the cascade and enrich the trajectory with per-sample context.

    Adds posture and inertia samples plus dynamics-residual and energy
    series to the bare solver output.
    """
    traj = integrate(cascade, x0, t_span, cfg, t_eval=t_eval)
    postures = []
    inertias = []
    residuals = np.empty(len(traj))
    energies = np.empty(len(traj))
    for i, (t, x) in enumerate(zip(traj.times, traj.states)):
        a, b, y, r = cascade.geometry_at(float(t), float(x[5]))
        postures.append(posture_from_axes(a, b))
        inertias.append(y)
        residuals[i] = cascade.residual(float(t), x)
        energies[i] = cascade.energy(float(t), x)
    diag = replace(traj.diagnostics, residuals=residuals, energies=energies)
    return replace(
        traj,
        postures=tuple(postures),
        inertias=tuple(inertias),
        diagnostics=diag,
    )
