"""Classical working point of the driven cavity.

At steady state ``p_s = 0`` and the mirror displacement balances radiation
pressure, ``q_s = g0 * sum_groups |sum alpha|^2 / omega_m``. For fixed ``q`` the
optical amplitudes solve a linear system, which turns the single-cavity
problem into a real cubic in ``q``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, OscillationDetected, SchemeMismatch
from .model import DerivedConstants, Scheme

RESIDUAL_RTOL = 1e-8
FIXED_POINT_RTOL = 1e-12
MAX_ITER = 10_000
DAMPING = 0.5
HOMOTOPY_STEPS = 20


@dataclass(frozen=True)
class SteadyState:
    q_s: np.ndarray
    alpha: np.ndarray
    residual: float

    def to_dict(self) -> dict:
        return {
            "q_s": [float(q) for q in self.q_s],
            "p_s": [0.0 for _ in self.q_s],
            "alpha": [[float(a.real), float(a.imag)] for a in self.alpha],
            "residual": float(self.residual),
        }


def _groups(n_optical):
    return [(0, 1)] if n_optical == 2 else [(0, 1), (2, 3)]


def _amplitudes(dc: DerivedConstants, q: float) -> np.ndarray:
    """Optical amplitudes at fixed displacement, by dense linear solve."""
    alpha = np.zeros(dc.n_optical, dtype=complex)
    for grp in _groups(dc.n_optical):
        idx = list(grp)
        m = np.diag(1j * dc.delta[idx] + dc.kappa[idx]) - 1j * dc.g0 * q * np.ones((2, 2))
        alpha[idx] = np.linalg.solve(m, dc.eta[idx].astype(complex))
    return alpha


def _radiation_pressure(dc: DerivedConstants, alpha) -> float:
    return dc.g0 * sum(abs(alpha[list(g)].sum()) ** 2 for g in _groups(dc.n_optical))


def stationary_rhs(dc: DerivedConstants, q: float, alpha) -> np.ndarray:
    """Right-hand side of the mean-field equations with zero time derivatives.

    Ordered as ``(q_dot, p_dot, a_1_dot, ..., a_n_dot)`` with ``p = 0``.
    """
    alpha = np.asarray(alpha, dtype=complex)
    out = np.zeros(2 + dc.n_optical, dtype=complex)
    out[1] = -dc.omega_m * q + _radiation_pressure(dc, alpha)
    for grp in _groups(dc.n_optical):
        s = alpha[list(grp)].sum()
        for j in grp:
            out[2 + j] = (
                -(1j * dc.delta[j] + dc.kappa[j]) * alpha[j]
                + 1j * dc.g0 * s * q
                + dc.eta[j]
            )
    return out


def _state(dc, q):
    alpha = _amplitudes(dc, q)
    res = float(np.max(np.abs(stationary_rhs(dc, q, alpha))))
    return SteadyState(q_s=np.array([q]), alpha=alpha, residual=res)


def _check_residual(dc, ss):
    scale = max(float(np.max(np.abs(dc.eta))), 1.0)
    if ss.residual > RESIDUAL_RTOL * scale:
        raise NoConvergence("steady state does not satisfy the stationary equations",
                            ss.residual)


# -- single cavity: closed-form cubic ------------------------------------------

def _cubic_coefficients(dc: DerivedConstants, power_scale: float = 1.0):
    """Coefficients of ``b x^3 + 2a x^2 + x - 1`` with ``q = q0 * x``."""
    d = 1j * dc.delta[:2] + dc.kappa[:2]
    eta = dc.eta[:2] * np.sqrt(power_scale)
    s0 = np.sum(eta / d)
    t = np.sum(1.0 / d)
    q0 = dc.g0 * abs(s0) ** 2 / dc.omega_m
    a = dc.g0 * q0 * t.imag
    b = (dc.g0 * q0 * abs(t)) ** 2
    return q0, a, b, s0, t


def _real_roots(a, b):
    coeffs = [b, 2 * a, 1.0, -1.0]
    # drop vanishing leading coefficients so np.roots stays well scaled
    while len(coeffs) > 2 and abs(coeffs[0]) < 1e-300:
        coeffs = coeffs[1:]
    roots = np.roots(coeffs)
    real = [r.real for r in roots if abs(r.imag) <= 1e-9 * max(1.0, abs(r))]
    return np.array(sorted(_newton(a, b, x) for x in real))


def _newton(a, b, x, iters=50):
    for _ in range(iters):
        f = ((b * x + 2 * a) * x + 1.0) * x - 1.0
        fp = (3 * b * x + 4 * a) * x + 1.0
        if fp == 0:
            break
        step = f / fp
        x -= step
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            break
    return x


def cubic_roots(dc: DerivedConstants, power_scale: float = 1.0) -> np.ndarray:
    """All physical displacement roots ``q_s``, ascending."""
    q0, a, b, _, _ = _cubic_coefficients(dc, power_scale)
    if q0 == 0.0:
        return np.array([0.0])
    x = _real_roots(a, b)
    return q0 * x[x > 0]


def homotopy_path(dc: DerivedConstants, n_steps: int = HOMOTOPY_STEPS):
    """Follow the root continuously connected to ``P -> 0``.

    Returns the list of ``(power_scale, q_s)`` along the path.
    """
    path = []
    x_prev = 1.0
    for k in range(1, n_steps + 1):
        lam = k / n_steps
        q0, a, b, _, _ = _cubic_coefficients(dc, lam)
        if q0 == 0.0:
            path.append((lam, 0.0))
            continue
        xs = _real_roots(a, b)
        xs = xs[xs > 0]
        if len(xs) == 0:
            raise NoConvergence("power homotopy lost the physical root")
        x_prev = xs[np.argmin(np.abs(xs - x_prev))]
        path.append((lam, q0 * x_prev))
    return path


def solve_single_cavity(dc: DerivedConstants, require_stable: bool = True) -> SteadyState:
    """Working point of one two-mode cavity from the stationary cubic.

    With several admissible roots the one reached by ramping the power up
    from zero is preferred; if its linearization is unstable the next-closest
    stable root replaces it.
    """
    if dc.n_optical != 2:
        raise SchemeMismatch("solve_single_cavity expects a two-mode cavity")
    roots = cubic_roots(dc)
    if len(roots) == 0:
        raise NoConvergence("stationary cubic has no positive real root")
    if len(roots) == 1:
        ss = _state(dc, float(roots[0]))
        _check_residual(dc, ss)
        return ss

    q_h = homotopy_path(dc)[-1][1]
    ordered = sorted(roots, key=lambda q: abs(q - q_h))
    states = [_state(dc, float(q)) for q in ordered]
    for ss in states:
        _check_residual(dc, ss)
    if require_stable:
        from .dynamics import build_single, check_stability

        for ss in states:
            if check_stability(build_single(dc, ss)).stable:
                return ss
    return states[0]


# -- general: fixed-point iteration --------------------------------------------

def _fixed_point(dc: DerivedConstants) -> SteadyState:
    q = 0.0
    damped = False
    history = []
    for _ in range(MAX_ITER):
        f = _radiation_pressure(dc, _amplitudes(dc, q)) / dc.omega_m
        q_new = DAMPING * q + (1 - DAMPING) * f if damped else f
        if abs(q_new - q) <= FIXED_POINT_RTOL * abs(q_new) or q_new == q:
            ss = _state(dc, q_new)
            _check_residual(dc, ss)
            return ss
        history.append(q_new)
        if len(history) >= 3:
            a, b, c = history[-3:]
            if abs(c - a) < 1e-3 * abs(c - b):
                if damped:
                    raise OscillationDetected("fixed point iteration is cycling with period 2",
                                              abs(c - b))
                damped = True
                history.clear()
        q = q_new
    raise NoConvergence("fixed point iteration budget exhausted", abs(q_new - q))


def solve_self_consistent(models, scheme) -> SteadyState:
    """Working point by alternating linear solves and displacement updates.

    ``models`` is one ``DerivedConstants`` per cavity. Cavities joined by a beam
    splitter interact only through their outputs, so they are solved
    independently and concatenated (one ``q_s`` per cavity).
    """
    scheme = Scheme(scheme)
    if isinstance(models, DerivedConstants):
        models = [models]
    expected = {Scheme.SINGLE: 2, Scheme.TWO_CAVITY_BS: 2, Scheme.DUAL_POLARIZATION: 4}[scheme]
    for dc in models:
        if dc.n_optical != expected:
            raise SchemeMismatch(f"{scheme.value} expects {expected} optical modes per cavity")
    if scheme != Scheme.TWO_CAVITY_BS and len(models) != 1:
        raise SchemeMismatch(f"{scheme.value} expects a single cavity")
    states = [_fixed_point(dc) for dc in models]
    if len(states) == 1:
        return states[0]
    return SteadyState(
        q_s=np.concatenate([s.q_s for s in states]),
        alpha=np.concatenate([s.alpha for s in states]),
        residual=max(s.residual for s in states),
    )


def split(ss: SteadyState, n_optical_per_cavity: int = 2):
    """Per-cavity views of a concatenated steady state."""
    out = []
    for i, q in enumerate(ss.q_s):
        sl = slice(i * n_optical_per_cavity, (i + 1) * n_optical_per_cavity)
        out.append(SteadyState(q_s=np.array([q]), alpha=ss.alpha[sl], residual=ss.residual))
    return out
