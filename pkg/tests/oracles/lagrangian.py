"""Independent rolling-ring model used to cross-check tumble_rhs.

Derived from first principles with sympy: a rigid circular ring
(in-plane moment I1, normal moment I3) rolling without slip on a plane
inclined by alpha, described by generalized coordinates
(psi, theta, phi, X, Y) with the no-slip contact condition imposed
through Lagrange multipliers. Accelerations come from the numeric KKT
solve of the constrained Euler-Lagrange system at each queried state, so
nothing here shares code or algebra with the package implementation.

Building the lambdified pieces takes a few seconds of sympy work; it
happens once at import.
"""

from __future__ import annotations

import numpy as np
import sympy as sp

_t = sp.symbols("t")
_qf = [sp.Function(n)(_t) for n in ["psi", "th", "ph", "X", "Y"]]
_psi, _th, _ph, _X, _Y = _qf
_m, _g, _r, _I1, _I3, _alpha = sp.symbols("m g r I1 I3 alpha", positive=True)
_S, _C = sp.sin, sp.cos

# body angular rates for the z-x-z Euler sequence
_w1 = _th.diff(_t)
_w2 = _psi.diff(_t) * _S(_th)
_w3 = _psi.diff(_t) * _C(_th) + _ph.diff(_t)
_Z = _r * _S(_th)
_T = sp.Rational(1, 2) * _m * (_X.diff(_t) ** 2 + _Y.diff(_t) ** 2 + _Z.diff(_t) ** 2) + sp.Rational(
    1, 2
) * (_I1 * _w1**2 + _I1 * _w2**2 + _I3 * _w3**2)
# gravity (-g sin a, 0, -g cos a) in the contact frame, downhill along -x
_V = _m * _g * (sp.sin(_alpha) * _X + sp.cos(_alpha) * _Z)
_L = _T - _V

# world angular velocity and center-to-contact lever for the constraint
_wx = _th.diff(_t) * _C(_psi) + _ph.diff(_t) * _S(_psi) * _S(_th)
_wy = _th.diff(_t) * _S(_psi) - _ph.diff(_t) * _C(_psi) * _S(_th)
_wz = _psi.diff(_t) + _ph.diff(_t) * _C(_th)
_lx, _ly, _lz = _r * _S(_psi) * _C(_th), -_r * _C(_psi) * _C(_th), -_r * _S(_th)
_vcx = _X.diff(_t) + (_wy * _lz - _wz * _ly)
_vcy = _Y.diff(_t) + (_wz * _lx - _wx * _lz)

_qd = [qi.diff(_t) for qi in _qf]
_qdd = [qi.diff(_t, 2) for qi in _qf]
_n = len(_qf)

_EL = [sp.diff(sp.diff(_L, _qd[i]), _t) - sp.diff(_L, _qf[i]) for i in range(_n)]
_cons = [_vcx, _vcy]
_A = sp.Matrix([[sp.diff(c, qdi) for qdi in _qd] for c in _cons])
_dcons = [sp.diff(c, _t) for c in _cons]

_zero_acc = {a: 0 for a in _qdd}
_Mmat = sp.Matrix([[sp.diff(_EL[i], _qdd[j]) for j in range(_n)] for i in range(_n)])
_hvec = sp.Matrix([_EL[i].subs(_zero_acc) for i in range(_n)])
_cvec = sp.Matrix([dc.subs(_zero_acc) for dc in _dcons])

_sv = sp.symbols("psi0 th0 ph0 dpsi dth dph vx vy")
_sub = {
    _psi: _sv[0],
    _th: _sv[1],
    _ph: _sv[2],
    _psi.diff(_t): _sv[3],
    _th.diff(_t): _sv[4],
    _ph.diff(_t): _sv[5],
    _X.diff(_t): _sv[6],
    _Y.diff(_t): _sv[7],
    _X: 0,
    _Y: 0,
}
_args = _sv + (_m, _g, _r, _I1, _I3, _alpha)
_fM = sp.lambdify(_args, _Mmat.subs(_sub), "numpy")
_fh = sp.lambdify(_args, _hvec.subs(_sub), "numpy")
_fA = sp.lambdify(_args, _A.subs(_sub), "numpy")
_fc = sp.lambdify(_args, _cvec.subs(_sub), "numpy")
_fcon = sp.lambdify(_args, sp.Matrix(_cons).subs(_sub), "numpy")


def rolling_com_velocity(state6, mv, gv, rv, I1v, I3v, av) -> np.ndarray:
    """(vx, vy) of the ring center satisfying the no-slip constraint."""
    con = np.array(_fcon(*state6, 0.0, 0.0, mv, gv, rv, I1v, I3v, av), float).ravel()
    return -con


def constraint_residual(state8, mv, gv, rv, I1v, I3v, av) -> np.ndarray:
    """No-slip residual (v_contact_x, v_contact_y) at a full state."""
    return np.array(_fcon(*state8, mv, gv, rv, I1v, I3v, av), float).ravel()


def oracle_acc(state8, mv, gv, rv, I1v, I3v, av) -> np.ndarray:
    """(psi_dd, th_dd, ph_dd, X_dd, Y_dd) from the constrained system.

    state8 = (psi, th, ph, dpsi, dth, dph, vx, vy) with (vx, vy) already
    satisfying the rolling constraint.
    """
    M = np.array(_fM(*state8, mv, gv, rv, I1v, I3v, av), float)
    h = np.array(_fh(*state8, mv, gv, rv, I1v, I3v, av), float).ravel()
    Am = np.array(_fA(*state8, mv, gv, rv, I1v, I3v, av), float)
    cv = np.array(_fc(*state8, mv, gv, rv, I1v, I3v, av), float).ravel()
    K = np.block([[M, -Am.T], [Am, np.zeros((2, 2))]])
    rhs = np.concatenate([-h, -cv])
    sol = np.linalg.solve(K, rhs)
    return sol[:5]
