"""Direct collocation steering of the tumbling ring.

The transcription stacks the tumbling states and the inertia-triple
outputs on a uniform time grid with a free final time:

    z = [x_1 .. x_n, y_1 .. y_n, t_f]

States are interpolated by a cubic Hermite polynomial on each interval,
outputs linearly; dynamics enter as midpoint defect constraints on the
interpolant derivative. The inertia outputs are the decision channel: a
solved output schedule is mapped back to axis commands by inverting the
inertia quadrature at fixed perimeter, and the closed chain is verified
by re-integrating the cascade under those commands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import optimize as _opt

from .errors import DefectEvaluationError, UnrealizableInertiaError
from .geometry import (
    AxisSchedule,
    FrozenAxes,
    InertiaTriple,
    RadiusPolicy,
    RingParams,
    inertia_triple,
    solve_axis_for_perimeter,
)
from .integrators import IntegratorConfig, Trajectory, TumbleCascade, integrate_cascade
from .tumbling import SlopeModel, contact_radius, tumble_rhs

__all__ = [
    "DecisionVector",
    "SteeringProblem",
    "SteeringReport",
    "interpolate_output",
    "interpolate_state",
    "interpolate_state_derivative",
    "collocation_defects",
    "boundary_residuals",
    "inequality_bounds",
    "steering_cost",
    "solve_steering",
    "inertia_to_axes",
    "CommandedAxes",
    "initial_guess",
    "reintegrate",
    "SlsqpBackend",
]

STATE_DIM = 8
OUTPUT_DIM = 3
HEADING_INDEX = 3  # packed-state slot of the heading angle
HEADING_RATE_INDEX = 0


class _RawTriple(NamedTuple):
    # duck-typed stand-in for InertiaTriple inside NLP iterations, where
    # intermediate outputs may transiently violate the physical invariants
    y1: float
    y2: float
    y3: float


@dataclass(frozen=True)
class DecisionVector:
    """Stacked collocation unknowns: node states, node outputs, final time."""

    states: np.ndarray  # (n, 8)
    outputs: np.ndarray  # (n, 3)
    final_time: float

    def __post_init__(self):
        s = np.asarray(self.states, dtype=float)
        y = np.asarray(self.outputs, dtype=float)
        object.__setattr__(self, "states", s)
        object.__setattr__(self, "outputs", y)
        if s.ndim != 2 or s.shape[1] != STATE_DIM:
            raise ValueError("states must have shape (n, 8)")
        if y.shape != (s.shape[0], OUTPUT_DIM):
            raise ValueError("outputs must have shape (n, 3)")
        if s.shape[0] < 3:
            raise ValueError("need at least 3 collocation nodes")
        if not self.final_time > 0:
            raise ValueError("final_time must be positive")

    @property
    def n(self) -> int:
        return self.states.shape[0]

    def node_times(self) -> np.ndarray:
        return np.linspace(0.0, self.final_time, self.n)

    def pack(self) -> np.ndarray:
        return np.concatenate(
            [self.states.ravel(), self.outputs.ravel(), [self.final_time]]
        )

    @staticmethod
    def unpack(z: np.ndarray, n: int) -> "DecisionVector":
        z = np.asarray(z, dtype=float)
        expect = n * (STATE_DIM + OUTPUT_DIM) + 1
        if z.shape != (expect,):
            raise ValueError(f"decision vector must have {expect} entries")
        ns = n * STATE_DIM
        return DecisionVector(
            states=z[:ns].reshape(n, STATE_DIM),
            outputs=z[ns : ns + n * OUTPUT_DIM].reshape(n, OUTPUT_DIM),
            final_time=float(z[-1]),
        )


@dataclass(frozen=True)
class SteeringProblem:
    """Steer the ring's heading to theta_d by shaping its inertia outputs.

    y_bounds has shape (3, 2), rows (min, max) per output component; the
    box must admit at least one triple consistent with the perpendicular
    axis identity, otherwise the problem is rejected at construction.
    terminal_constraints lists (state index, target value) residuals
    applied at t_f on top of the fixed initial state.
    """

    n: int
    theta_d: float
    x_init: np.ndarray
    y_bounds: np.ndarray
    params: RingParams
    slope_model: SlopeModel = SlopeModel.EXTENDED
    cost_mode: str = "terminal"
    terminal_constraints: tuple[tuple[int, float], ...] = ((HEADING_RATE_INDEX, 0.0),)
    perp_slack: float = 1e-6
    t_f_init: float = 3.0
    t_f_bounds: tuple[float, float] = (0.5, 10.0)
    max_iter: int = 200
    nlp_tol: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "x_init", np.asarray(self.x_init, dtype=float))
        object.__setattr__(self, "y_bounds", np.asarray(self.y_bounds, dtype=float))
        if self.n < 3:
            raise ValueError("need at least 3 collocation nodes")
        if self.x_init.shape != (STATE_DIM,):
            raise ValueError("x_init must have 8 entries")
        if self.y_bounds.shape != (OUTPUT_DIM, 2):
            raise ValueError("y_bounds must have shape (3, 2)")
        lo, hi = self.y_bounds[:, 0], self.y_bounds[:, 1]
        if np.any(lo <= 0) or np.any(hi < lo):
            raise ValueError("output bounds must be positive with min <= max")
        # the box must intersect the perpendicular-axis identity surface
        if lo[0] + lo[2] > hi[1] + self.perp_slack or hi[0] + hi[2] < lo[1] - self.perp_slack:
            raise ValueError("y_bounds admit no perpendicular-axis-consistent triple")
        if self.cost_mode not in ("terminal", "trajectory"):
            raise ValueError("cost_mode must be 'terminal' or 'trajectory'")
        if not (0 < self.t_f_bounds[0] < self.t_f_bounds[1]):
            raise ValueError("t_f_bounds must be increasing and positive")
        if not (self.t_f_bounds[0] <= self.t_f_init <= self.t_f_bounds[1]):
            raise ValueError("t_f_init must lie within t_f_bounds")


# ---------------------------------------------------------------------------
# interpolation


def interpolate_output(y_i, y_ip1, t_i: float, t_ip1: float, t: float) -> np.ndarray:
    """Linear output interpolation on one interval."""
    if not t_i <= t <= t_ip1:
        raise ValueError("t outside the interval")
    s = (t - t_i) / (t_ip1 - t_i)
    return (1.0 - s) * np.asarray(y_i, dtype=float) + s * np.asarray(y_ip1, dtype=float)


def _hermite_coefficients(x_j, x_jp1, f_j, f_jp1, h_j: float):
    x0 = np.asarray(x_j, dtype=float)
    x1 = np.asarray(x_jp1, dtype=float)
    hf0 = h_j * np.asarray(f_j, dtype=float)
    hf1 = h_j * np.asarray(f_jp1, dtype=float)
    c0 = x0
    c1 = hf0
    c2 = -3.0 * x0 - 2.0 * hf0 + 3.0 * x1 - hf1
    c3 = 2.0 * x0 + hf0 - 2.0 * x1 + hf1
    return c0, c1, c2, c3


def interpolate_state(x_j, x_jp1, f_j, f_jp1, h_j: float, s: float) -> np.ndarray:
    """Cubic Hermite state interpolation at normalized position s in [0, 1].

    Matching the endpoint states and slopes exactly pins the four
    coefficients; at s = 1/2 the value reduces to the midpoint identity
    (x_j + x_jp1)/2 + h (f_j - f_jp1)/8.
    """
    c0, c1, c2, c3 = _hermite_coefficients(x_j, x_jp1, f_j, f_jp1, h_j)
    return c0 + s * (c1 + s * (c2 + s * c3))


def interpolate_state_derivative(x_j, x_jp1, f_j, f_jp1, h_j: float, s: float) -> np.ndarray:
    """Time derivative of the Hermite interpolant at normalized s."""
    _, c1, c2, c3 = _hermite_coefficients(x_j, x_jp1, f_j, f_jp1, h_j)
    return (c1 + s * (2.0 * c2 + s * 3.0 * c3)) / h_j


# ---------------------------------------------------------------------------
# transcription pieces


class _AxisLookup:
    """Memoized inverse of the inertia map, shared by schedule and defects."""

    def __init__(self, params: RingParams):
        self.params = params
        self._cache: dict[int, tuple[float, float]] = {}

    def axes_for(self, y3: float) -> tuple[float, float]:
        key = round(y3 / 1e-12)
        ab = self._cache.get(key)
        if ab is None:
            ab = inertia_to_axes(
                _RawTriple(1.0, 2.0, y3), self.params, component="y3"
            )
            self._cache[key] = ab
        return ab


def _dynamics(problem: SteeringProblem) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Node dynamics f(x, y) under the problem's radius policy.

    MEAN_RADIUS keeps the lever fixed at P / (2 pi), decoupled from the
    outputs; SUPPORT_FUNCTION recovers the axes behind each output triple
    and lets the lever follow the spin angle.
    """
    params = problem.params
    if params.radius_policy is RadiusPolicy.MEAN_RADIUS:
        r_const = params.perimeter / (2.0 * math.pi)

        def f(x: np.ndarray, y: np.ndarray) -> np.ndarray:
            return tumble_rhs(x, _RawTriple(*y), params, r_const, problem.slope_model)

        return f

    lookup = _AxisLookup(params)

    def f(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        a, b = lookup.axes_for(float(y[2]))
        r = contact_radius(a, b, float(x[5]), RadiusPolicy.SUPPORT_FUNCTION)
        return tumble_rhs(x, _RawTriple(*y), params, r, problem.slope_model)

    return f


def collocation_defects(
    dec: DecisionVector,
    problem: SteeringProblem,
    dynamics: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
) -> np.ndarray:
    """Midpoint defect residuals, shape (n-1, 8).

    Each interval compares the Hermite interpolant's time derivative at
    the midpoint against the dynamics evaluated on the interpolated state
    and the linearly interpolated output. Zero defects mean the grid is a
    dynamically feasible trajectory to the transcription's order.
    """
    f = dynamics if dynamics is not None else _dynamics(problem)
    n = dec.n
    h = dec.final_time / (n - 1)
    F = np.empty((n, STATE_DIM))
    for j in range(n):
        try:
            F[j] = f(dec.states[j], dec.outputs[j])
        except Exception as e:  # noqa: BLE001 - annotate with the interval
            raise DefectEvaluationError(min(j, n - 2), e) from e
    out = np.empty((n - 1, STATE_DIM))
    for j in range(n - 1):
        x_mid = interpolate_state(
            dec.states[j], dec.states[j + 1], F[j], F[j + 1], h, 0.5
        )
        dx_mid = interpolate_state_derivative(
            dec.states[j], dec.states[j + 1], F[j], F[j + 1], h, 0.5
        )
        y_mid = 0.5 * (dec.outputs[j] + dec.outputs[j + 1])
        try:
            out[j] = dx_mid - f(x_mid, y_mid)
        except Exception as e:  # noqa: BLE001
            raise DefectEvaluationError(j, e) from e
    return out


def boundary_residuals(dec: DecisionVector, problem: SteeringProblem) -> np.ndarray:
    """Initial-state residuals plus the configured terminal residuals."""
    res = [dec.states[0] - problem.x_init]
    for idx, target in problem.terminal_constraints:
        res.append(np.array([dec.states[-1, idx] - target]))
    return np.concatenate(res)


def inequality_bounds(dec: DecisionVector, problem: SteeringProblem) -> np.ndarray:
    """Inequality residuals g <= 0: output box per node plus perpendicular slack.

    For each node the three output components must stay inside their
    [min, max] band, and y2 must match y1 + y3 within the configured
    slack. Positive entries measure violation.
    """
    lo, hi = problem.y_bounds[:, 0], problem.y_bounds[:, 1]
    y = dec.outputs
    below = (lo[None, :] - y).ravel()
    above = (y - hi[None, :]).ravel()
    perp = y[:, 1] - (y[:, 0] + y[:, 2])
    slack = problem.perp_slack
    return np.concatenate([below, above, perp - slack, -perp - slack])


def steering_cost(dec: DecisionVector, problem: SteeringProblem) -> float:
    """Steering objective on the grid values.

    terminal mode: |heading(t_f) - theta_d|. trajectory mode: root sum of
    squares of the per-node heading errors.
    """
    if problem.cost_mode == "terminal":
        return abs(float(dec.states[-1, HEADING_INDEX]) - problem.theta_d)
    err = dec.states[:, HEADING_INDEX] - problem.theta_d
    return float(math.sqrt(float(np.dot(err, err))))


# ---------------------------------------------------------------------------
# inertia inversion


def inertia_to_axes(
    y,
    params: RingParams,
    component: str = "y3",
    tol: float = 1e-8,
) -> tuple[float, float]:
    """Semi-axes (a, b) at the fixed perimeter realizing an inertia target.

    Root-finds over b for the requested component of the quadrature
    triple (a slaved to the perimeter throughout), so the returned pair
    round-trips through inertia_triple to within tol. Raises
    UnrealizableInertiaError, carrying the smallest attainable mismatch,
    when the target exceeds what any axis pair at this perimeter reaches.
    """
    if component not in ("y1", "y2", "y3"):
        raise ValueError("component must be one of 'y1', 'y2', 'y3'")
    target = float(getattr(y, component))
    if not (math.isfinite(target) and target > 0):
        raise ValueError("inertia target must be positive and finite")
    P = params.perimeter
    comp_idx = {"y1": 0, "y2": 1, "y3": 2}[component]

    def attained(b: float) -> float:
        a = solve_axis_for_perimeter(P, b, params.quad_points)
        t = inertia_triple(a, b, params)
        return (t.y1, t.y2, t.y3)[comp_idx]

    # bracket the monotone branch: y3 grows with b from the needle limit
    # up to a maximum just before the ellipse collapses at b -> P/4
    b_lo, b_hi = 1e-3 * P, 0.2499 * P
    grid = np.linspace(b_lo, b_hi, 48)
    vals = np.array([attained(b) for b in grid])
    resid = vals - target
    sign_change = np.nonzero(np.diff(np.sign(resid)) != 0)[0]
    if sign_change.size == 0:
        best = float(np.min(np.abs(resid)))
        raise UnrealizableInertiaError(
            f"no axis pair at perimeter {P:.6g} attains {component}={target:.6g} "
            f"(closest mismatch {best:.3e})",
            best,
        )
    j = int(sign_change[0])
    b_star = _opt.brentq(
        lambda b: attained(b) - target, grid[j], grid[j + 1], xtol=1e-14, rtol=8.9e-16
    )
    a_star = solve_axis_for_perimeter(P, b_star, params.quad_points)
    final = inertia_triple(a_star, b_star, params)
    err = abs((final.y1, final.y2, final.y3)[comp_idx] - target)
    if err > tol * max(1.0, abs(target)):
        raise UnrealizableInertiaError(
            f"inertia inversion stalled at mismatch {err:.3e} for {component}={target:.6g}",
            err,
        )
    return a_star, b_star


@dataclass
class CommandedAxes(AxisSchedule):
    """Axis commands realizing a solved output schedule.

    Linearly interpolates the node outputs in time and inverts the y3
    channel to axes at the fixed perimeter; past the final node the last
    command holds. Rates come from central differences since commands are
    only piecewise smooth.

    The inversion goes through a monotone table precomputed over the
    commanded y3 range (endpoints pinned by the exact root-find), so
    evaluating the schedule inside an integration loop costs an
    interpolation rather than a fresh root-find per call.
    """

    decision: DecisionVector
    params: RingParams
    table_size: int = 384

    def __post_init__(self):
        y3_nodes = np.asarray(self.decision.outputs[:, 2], dtype=float)
        lo, hi = float(np.min(y3_nodes)), float(np.max(y3_nodes))
        if hi - lo < 1e-12:
            self._const = inertia_to_axes(_RawTriple(1.0, 2.0, lo), self.params)
            self._table = None
            return
        self._const = None
        b_lo = inertia_to_axes(_RawTriple(1.0, 2.0, lo), self.params)[1]
        b_hi = inertia_to_axes(_RawTriple(1.0, 2.0, hi), self.params)[1]
        P, qp = self.params.perimeter, self.params.quad_points
        bs = np.linspace(b_lo, b_hi, self.table_size)
        a_vals = np.empty_like(bs)
        y3_vals = np.empty_like(bs)
        a_prev = None
        for i, b in enumerate(bs):
            a_prev = solve_axis_for_perimeter(P, float(b), qp, initial=a_prev)
            a_vals[i] = a_prev
            y3_vals[i] = inertia_triple(a_prev, float(b), self.params).y3
        # commands stay on the rising y3 branch, so the table is monotone
        self._table = (y3_vals, a_vals, bs)

    def _y3(self, t: float) -> float:
        times = self.decision.node_times()
        y3 = self.decision.outputs[:, 2]
        if t <= times[0]:
            return float(y3[0])
        if t >= times[-1]:
            return float(y3[-1])
        return float(np.interp(t, times, y3))

    def axes(self, t: float) -> tuple[float, float]:
        if self._const is not None:
            return self._const
        y3s, a_vals, b_vals = self._table
        y3 = min(max(self._y3(t), float(y3s[0])), float(y3s[-1]))
        return float(np.interp(y3, y3s, a_vals)), float(np.interp(y3, y3s, b_vals))

    def rates(self, t: float) -> tuple[float, float]:
        dt = 1e-6
        a0, b0 = self.axes(t - dt)
        a1, b1 = self.axes(t + dt)
        return (a1 - a0) / (2 * dt), (b1 - b0) / (2 * dt)


# ---------------------------------------------------------------------------
# NLP solve


@dataclass(frozen=True)
class SteeringReport:
    """Outcome of a steering solve, successful or not.

    status is one of 'converged', 'iteration_limit', 'line_search_failure',
    'infeasible_bounds'. decision always holds the best iterate found;
    max_violation and stationarity are measured on it directly rather than
    trusted from the backend.
    """

    status: str
    converged: bool
    decision: DecisionVector
    cost: float
    max_violation: float
    stationarity: float
    n_iter: int
    message: str
    breakdown: dict


class SlsqpBackend:
    """Sequential quadratic programming via scipy's SLSQP.

    The toolkit treats the backend as a black box satisfying a small
    contract (minimize with equality/inequality constraints, variable
    bounds, explicit jacobian callables), so an exact-Hessian SQP could
    be swapped in without touching the transcription.
    """

    def solve(self, objective, obj_grad, eq, eq_jac, ineq, ineq_jac, bounds, z0, max_iter, tol):
        cons = [
            {"type": "eq", "fun": eq, "jac": eq_jac},
            {"type": "ineq", "fun": ineq, "jac": ineq_jac},
        ]
        res = _opt.minimize(
            objective,
            z0,
            jac=obj_grad,
            bounds=bounds,
            constraints=cons,
            method="SLSQP",
            options={"maxiter": max_iter, "ftol": tol},
        )
        return res


def _central_jacobian(fun: Callable[[np.ndarray], np.ndarray]):
    """Central-difference jacobian with per-component step 1e-6 (1 + |z_i|)."""

    def jac(z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        f0 = np.atleast_1d(fun(z))
        J = np.empty((f0.size, z.size))
        for i in range(z.size):
            h = 1e-6 * (1.0 + abs(z[i]))
            zp = z.copy()
            zm = z.copy()
            zp[i] += h
            zm[i] -= h
            J[:, i] = (np.atleast_1d(fun(zp)) - np.atleast_1d(fun(zm))) / (2.0 * h)
        return J

    return jac


def initial_guess(problem: SteeringProblem) -> DecisionVector:
    """Integrate-then-sample starting point.

    Simulates the cascade from the fixed initial state with the posture
    frozen at the circle of the problem's perimeter, samples the node
    grid, and fills every output node with the circle inertia triple.
    """
    P = problem.params.perimeter
    R = P / (2.0 * math.pi)
    cascade = TumbleCascade(problem.params, FrozenAxes(R, R), problem.slope_model)
    t_nodes = np.linspace(0.0, problem.t_f_init, problem.n)
    cfg = IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10)
    traj = integrate_cascade(cascade, problem.x_init, (0.0, problem.t_f_init), cfg, t_eval=t_nodes)
    y_circle = inertia_triple(R, R, problem.params).as_array()
    outputs = np.tile(y_circle, (problem.n, 1))
    lo, hi = problem.y_bounds[:, 0], problem.y_bounds[:, 1]
    outputs = np.clip(outputs, lo[None, :], hi[None, :])
    return DecisionVector(
        states=traj.states.copy(), outputs=outputs, final_time=problem.t_f_init
    )


def _stationarity(z, eq_jac_val, ineq_val, ineq_jac_val, bounds, grad0) -> float:
    """Infinity norm of the projected Lagrangian gradient.

    Multipliers come from a least-squares fit over the equality rows, the
    active inequality rows and the active variable bounds.
    """
    rows = [eq_jac_val]
    active = np.nonzero(ineq_val > -1e-8)[0]
    if active.size:
        rows.append(ineq_jac_val[active])
    bound_rows = []
    for i, (lo, hi) in enumerate(bounds):
        if lo is not None and z[i] - lo < 1e-8:
            e = np.zeros(z.size)
            e[i] = 1.0
            bound_rows.append(e)
        elif hi is not None and hi - z[i] < 1e-8:
            e = np.zeros(z.size)
            e[i] = 1.0
            bound_rows.append(e)
    if bound_rows:
        rows.append(np.array(bound_rows))
    A = np.vstack(rows).T  # columns are constraint gradients
    lam, *_ = np.linalg.lstsq(A, -grad0, rcond=None)
    return float(np.max(np.abs(grad0 + A @ lam)))


def solve_steering(
    problem: SteeringProblem,
    initial: DecisionVector | None = None,
    backend=None,
) -> SteeringReport:
    """Solve the steering NLP and audit the result.

    Success requires the measured constraint violation below 1e-6 and the
    projected stationarity below 1e-4; anything else comes back as a
    failure report carrying the best iterate, its violation breakdown and
    a status naming the failure mode.
    """
    if initial is None:
        initial = initial_guess(problem)
    if initial.n != problem.n:
        raise ValueError("initial guess node count does not match the problem")
    backend = backend if backend is not None else SlsqpBackend()
    n = problem.n
    dyn = _dynamics(problem)

    def unpack(z):
        return DecisionVector.unpack(z, n)

    def eq_fun(z):
        dec = unpack(z)
        return np.concatenate(
            [collocation_defects(dec, problem, dyn).ravel(), boundary_residuals(dec, problem)]
        )

    def ineq_fun_leq(z):
        # g <= 0 convention; only the perpendicular-axis slack rows, since
        # the output box is enforced through variable bounds
        dec = unpack(z)
        perp = dec.outputs[:, 1] - (dec.outputs[:, 0] + dec.outputs[:, 2])
        return np.concatenate([perp - problem.perp_slack, -perp - problem.perp_slack])

    def ineq_fun_scipy(z):
        return -ineq_fun_leq(z)

    if problem.cost_mode == "terminal":

        def objective(z):
            dec = unpack(z)
            d = float(dec.states[-1, HEADING_INDEX]) - problem.theta_d
            return d * d

    else:

        def objective(z):
            dec = unpack(z)
            err = dec.states[:, HEADING_INDEX] - problem.theta_d
            return float(np.dot(err, err))

    obj_grad_vec = _central_jacobian(lambda z: np.array([objective(z)]))

    def obj_grad(z):
        return obj_grad_vec(z)[0]

    eq_jac = _central_jacobian(eq_fun)
    ineq_jac_scipy = _central_jacobian(ineq_fun_scipy)

    lo, hi = problem.y_bounds[:, 0], problem.y_bounds[:, 1]
    bounds: list[tuple[float | None, float | None]] = []
    bounds += [(None, None)] * (n * STATE_DIM)
    for _ in range(n):
        for c in range(OUTPUT_DIM):
            bounds.append((float(lo[c]), float(hi[c])))
    bounds.append((float(problem.t_f_bounds[0]), float(problem.t_f_bounds[1])))

    from .errors import MorphringError

    try:
        res = backend.solve(
            objective,
            obj_grad,
            eq_fun,
            eq_jac,
            ineq_fun_scipy,
            ineq_jac_scipy,
            bounds,
            initial.pack(),
            problem.max_iter,
            problem.nlp_tol,
        )
    except MorphringError as e:
        # a dynamics singularity inside an iterate; report, do not crash
        dec = initial
        return SteeringReport(
            status="line_search_failure",
            converged=False,
            decision=dec,
            cost=steering_cost(dec, problem),
            max_violation=math.inf,
            stationarity=math.inf,
            n_iter=0,
            message=f"dynamics failed during the solve: {e}",
            breakdown={},
        )

    z = np.asarray(res.x, dtype=float)
    dec = unpack(z)
    eq_val = eq_fun(z)
    ineq_val = ineq_fun_leq(z)
    bound_viol = 0.0
    for i, (blo, bhi) in enumerate(bounds):
        if blo is not None:
            bound_viol = max(bound_viol, blo - z[i])
        if bhi is not None:
            bound_viol = max(bound_viol, z[i] - bhi)
    defects = collocation_defects(dec, problem, dyn)
    breakdown = {
        "defects": float(np.max(np.abs(defects))) if defects.size else 0.0,
        "boundary": float(np.max(np.abs(boundary_residuals(dec, problem)))),
        "inequality": float(max(0.0, np.max(ineq_val))),
        "variable_bounds": float(max(0.0, bound_viol)),
    }
    max_violation = max(
        float(np.max(np.abs(eq_val))), breakdown["inequality"], breakdown["variable_bounds"]
    )
    grad0 = obj_grad(z)
    stat = _stationarity(
        z, eq_jac(z), ineq_val, -ineq_jac_scipy(z), bounds, grad0
    )
    converged = max_violation < 1e-6 and stat < 1e-4

    status_code = int(getattr(res, "status", -1))
    if converged:
        status = "converged"
    elif status_code == 9:
        status = "iteration_limit"
    elif status_code == 4 or float(np.min(hi - lo)) < 1e-9:
        status = "infeasible_bounds"
    else:
        status = "line_search_failure"

    return SteeringReport(
        status=status,
        converged=converged,
        decision=dec,
        cost=steering_cost(dec, problem),
        max_violation=float(max_violation),
        stationarity=stat,
        n_iter=int(getattr(res, "nit", 0)),
        message=str(getattr(res, "message", "")),
        breakdown=breakdown,
    )


def reintegrate(
    decision: DecisionVector,
    problem: SteeringProblem,
    cfg: IntegratorConfig | None = None,
) -> Trajectory:
    """Close the chain: simulate the cascade under the solved commands.

    Maps the output schedule to axis commands and re-integrates the full
    cascade from the problem's initial state to the solved final time.
    """
    schedule = CommandedAxes(decision, problem.params)
    cascade = TumbleCascade(problem.params, schedule, problem.slope_model)
    if cfg is None:
        cfg = IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10)
    grid = np.linspace(0.0, decision.final_time, max(200, 20 * decision.n))
    return integrate_cascade(cascade, problem.x_init, (0.0, decision.final_time), cfg, t_eval=grid)
