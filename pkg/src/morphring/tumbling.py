"""Tumbling dynamics of the rolling ring.

State convention (8-vector, rates first):

    x = [heading_rate, lean_rate, spin_rate, heading, lean, spin,
         contact_x, contact_y]

heading is the rotation about the contact-plane normal, lean the angle
between the ring plane and the contact plane (pi/2 = upright, 0 = flat,
where the mass matrix is singular), spin the rolling angle about the ring
normal. The mass matrix couples only the three angular accelerations; the
remaining rows are an identity handing rates and contact velocities
through, so the whole system solves by forward substitution.

The contact pair (contact_x, contact_y) integrates the rolling-contact
velocity, which equals the center-of-mass horizontal velocity under the
no-slip map; it tracks the CoM ground projection up to a constant and
coincides with the contact point for upright rolling.

Gravity on a slope: ``SlopeModel.VERBATIM`` keeps the flat-ground gravity
coupling untouched (only the lean row feels g). ``SlopeModel.EXTENDED``
resolves gravity in the contact frame as (-g sin alpha, 0, -g cos alpha)
with downhill along -x, which adds a spin drive and a heading-dependent
lean term and conserves mechanical energy on the incline.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import FlatRingError
from .geometry import InertiaTriple, RadiusPolicy, RingParams, ellipse_perimeter

__all__ = [
    "SlopeModel",
    "TumbleState",
    "BodyRates",
    "LEAN_SINGULARITY_EPS",
    "rotation_world_from_body",
    "rotation_zxz",
    "body_angular_velocity",
    "contact_radius",
    "mass_matrix",
    "forcing_vector",
    "tumble_rhs",
    "mechanical_energy",
]

LEAN_SINGULARITY_EPS = 1e-3


class SlopeModel(enum.Enum):
    VERBATIM = "verbatim"
    EXTENDED = "extended"


@dataclass(frozen=True)
class TumbleState:
    """Orientation, rates and contact coordinates of the tumbling ring.

    Field order matches the packed ODE state vector.
    """

    heading_rate: float
    lean_rate: float
    spin_rate: float
    heading: float
    lean: float
    spin: float
    contact_x: float
    contact_y: float

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def as_array(self) -> np.ndarray:
        return np.array(
            [
                self.heading_rate,
                self.lean_rate,
                self.spin_rate,
                self.heading,
                self.lean,
                self.spin,
                self.contact_x,
                self.contact_y,
            ]
        )

    @staticmethod
    def from_array(x) -> "TumbleState":
        v = np.asarray(x, dtype=float)
        if v.shape != (8,):
            raise ValueError("tumble state must have 8 entries")
        return TumbleState(*v.tolist())


@dataclass(frozen=True)
class BodyRates:
    wx: float
    wy: float
    wz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.wx, self.wy, self.wz])


def _unpack(state) -> tuple[float, float, float, float, float, float, float, float]:
    if isinstance(state, TumbleState):
        return (
            state.heading_rate,
            state.lean_rate,
            state.spin_rate,
            state.heading,
            state.lean,
            state.spin,
            state.contact_x,
            state.contact_y,
        )
    v = np.asarray(state, dtype=float)
    if v.shape != (8,):
        raise ValueError("tumble state must have 8 entries")
    return tuple(v.tolist())


def _rx(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _ry(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rz(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_world_from_body(state: TumbleState) -> np.ndarray:
    """World-from-body rotation, z-y-x composition over (lean, spin, heading).

    This is the orientation convention as published alongside the model;
    note it is not the generator of ``body_angular_velocity`` (see
    ``rotation_zxz`` for the composition that is).
    """
    _, _, _, psi, th, ph, _, _ = _unpack(state)
    return _rz(th) @ _ry(ph) @ _rx(psi)


def rotation_zxz(state: TumbleState) -> np.ndarray:
    """World-from-body rotation in the z-x-z (heading, lean, spin) order.

    Differentiating this composition reproduces ``body_angular_velocity``
    exactly, so it is the internally consistent orientation map; the
    finite-difference kinematics test pins that identity.
    """
    _, _, _, psi, th, ph, _, _ = _unpack(state)
    return _rz(psi) @ _rx(th) @ _rz(ph)


def body_angular_velocity(state: TumbleState) -> BodyRates:
    """Body-frame angular velocity from the Euler rates."""
    dpsi, dth, dph, _, th, ph, _, _ = _unpack(state)
    sth, cth = math.sin(th), math.cos(th)
    sph, cph = math.sin(ph), math.cos(ph)
    return BodyRates(
        dpsi * sth * sph + dth * cph,
        dpsi * sth * cph - dth * sph,
        dpsi * cth + dph,
    )


def contact_radius(
    a: float,
    b: float,
    spin: float,
    policy: RadiusPolicy,
    perimeter: float | None = None,
) -> float:
    """Lever length from ring center to the contact point.

    SUPPORT_FUNCTION: support distance of the ellipse along the ground
    direction at the current spin angle (b-axis meets the ground at zero
    spin). MEAN_RADIUS: the constant P / (2 pi); pass ``perimeter`` to
    reuse a known value, otherwise it is recomputed from the axes.
    """
    if a <= 0 or b <= 0:
        raise ValueError("semi-axes must be positive")
    if policy is RadiusPolicy.MEAN_RADIUS:
        P = ellipse_perimeter(a, b) if perimeter is None else perimeter
        return P / (2.0 * math.pi)
    s, c = math.sin(spin), math.cos(spin)
    return math.sqrt((a * s) ** 2 + (b * c) ** 2)


def _role_moments(y: InertiaTriple) -> tuple[float, float, float]:
    # (heading-row, lean-row, spin/symmetry) moments. The lean row takes
    # the second in-plane moment and the gyroscopic rows the ring-normal
    # moment; this assignment is what an independent constrained-Lagrangian
    # derivation of the rolling ring requires, and the circle limit pins it.
    return y.y1, y.y3, y.y2


def mass_matrix(state: TumbleState, y: InertiaTriple, m: float, r: float) -> np.ndarray:
    """8x8 mass matrix: a lower-triangular 3x3 dynamic block plus identity."""
    _, _, _, _, th, _, _, _ = _unpack(state)
    head, lean_m, sym = _role_moments(y)
    mr2 = m * r * r
    M = np.eye(8)
    M[0, 0] = head * math.sin(th)
    M[1, 1] = lean_m + mr2
    M[2, 0] = (sym + mr2) * math.cos(th)
    M[2, 2] = sym + mr2
    return M


def forcing_vector(
    state: TumbleState,
    y: InertiaTriple,
    params: RingParams,
    r: float,
    slope_model: SlopeModel = SlopeModel.EXTENDED,
) -> np.ndarray:
    """Right-hand vector N of the tumbling system M xdot = N.

    Rows: three angular-momentum balances (heading, lean, spin), the three
    kinematic pass-throughs, and the two rolling-contact velocities.
    """
    dpsi, dth, dph, psi, th, _, _, _ = _unpack(state)
    head, lean_m, sym = _role_moments(y)
    m, g, alpha = params.mass, params.gravity, params.incline
    mr2 = m * r * r
    sth, cth = math.sin(th), math.cos(th)
    spsi, cpsi = math.sin(psi), math.cos(psi)

    if slope_model is SlopeModel.EXTENDED:
        ca, sa = math.cos(alpha), math.sin(alpha)
        grav_lean = -m * g * r * (ca * cth + sa * spsi * sth)
        grav_spin = m * g * r * sa * cpsi
    else:
        grav_lean = -m * g * r * cth
        grav_spin = 0.0

    n1 = (sym - 2.0 * head) * dpsi * dth * cth + sym * dth * dph
    n2 = (
        (head - sym - mr2) * dpsi * dpsi * sth * cth
        - (sym + mr2) * dpsi * dph * sth
        + grav_lean
    )
    n3 = (sym + 2.0 * mr2) * dpsi * dth * sth + grav_spin
    n7 = -r * dpsi * cpsi * cth + r * dth * spsi * sth - r * dph * cpsi
    n8 = -r * dpsi * spsi * cth - r * dth * cpsi * sth - r * dph * spsi
    return np.array([n1, n2, n3, dpsi, dth, dph, n7, n8])


def tumble_rhs(
    state,
    y: InertiaTriple,
    params: RingParams,
    r: float,
    slope_model: SlopeModel = SlopeModel.EXTENDED,
    eps_sing: float = LEAN_SINGULARITY_EPS,
) -> np.ndarray:
    """Packed state derivative xdot = M^-1 N.

    Accepts a TumbleState or a raw 8-vector. The dynamic block is lower
    triangular, so the direct solve is three forward-substitution steps;
    the full-system residual M xdot - N stays at rounding level.

    Raises FlatRingError when |sin(lean)| <= eps_sing.
    """
    x = _unpack(state)
    th = x[4]
    sth = math.sin(th)
    if abs(sth) <= eps_sing:
        raise FlatRingError(th)
    N = forcing_vector(state, y, params, r, slope_model)
    head, lean_m, sym = _role_moments(y)
    mr2 = params.mass * r * r
    psi_acc = N[0] / (head * sth)
    th_acc = N[1] / (lean_m + mr2)
    ph_acc = (N[2] - (sym + mr2) * math.cos(th) * psi_acc) / (sym + mr2)
    return np.array([psi_acc, th_acc, ph_acc, N[3], N[4], N[5], N[6], N[7]])


def mechanical_energy(
    state,
    y: InertiaTriple,
    params: RingParams,
    r: float,
    slope_model: SlopeModel = SlopeModel.EXTENDED,
) -> float:
    """Kinetic plus potential energy of the rolling ring.

    The CoM velocity comes from the no-slip map (|v_cm|^2 reduces to
    r^2 (wz^2 + lean_rate^2)); the rotational part pairs each body rate
    with the moment its motion engages. Under EXTENDED the potential
    includes the downhill drop through contact_x, so the value is
    conserved on an incline; under VERBATIM it is the flat-ground form.
    """
    dpsi, dth, dph, psi, th, ph, px, py = _unpack(state)
    head, lean_m, sym = _role_moments(y)
    w = body_angular_velocity(
        state if isinstance(state, TumbleState) else TumbleState.from_array(state)
    )
    t_rot = 0.5 * (lean_m * w.wx**2 + head * w.wy**2 + sym * w.wz**2)
    wz = dpsi * math.cos(th) + dph
    t_cm = 0.5 * params.mass * r * r * (wz * wz + dth * dth)
    g = params.gravity
    if slope_model is SlopeModel.EXTENDED:
        pe = params.mass * g * (
            math.sin(params.incline) * px
            + math.cos(params.incline) * r * math.sin(th)
        )
    else:
        pe = params.mass * g * r * math.sin(th)
    return t_rot + t_cm + pe
