"""Steady-state covariance matrix from ``A V + V A^T = -D``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_continuous_lyapunov

from .dynamics import LinearModel, check_stability
from .errors import IllConditioned, UnstableSystem

RESIDUAL_RTOL = 1e-9
REFINE_STEPS = 2


@dataclass(frozen=True)
class CovarianceMatrix:
    V: np.ndarray
    modes: tuple

    @property
    def n_modes(self) -> int:
        return self.V.shape[0] // 2


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def min_uncertainty_eigenvalue(V) -> float:
    """Smallest eigenvalue of ``V + i Omega / 2`` (>= 0 for physical states)."""
    V = np.asarray(V)
    omega = symplectic_form(V.shape[0] // 2)
    return float(np.linalg.eigvalsh(V + 0.5j * omega)[0])


def is_physical(V, rtol=1e-9) -> bool:
    V = np.asarray(V)
    return min_uncertainty_eigenvalue(V) >= -rtol * max(np.linalg.norm(V), 1.0)


def lyapunov_residual(model, V) -> float:
    A = model.A
    D = model.D
    V = V.V if isinstance(V, CovarianceMatrix) else np.asarray(V)
    return float(np.linalg.norm(A @ V + V @ A.T + D, "fro"))


def solve_lyapunov(model: LinearModel) -> CovarianceMatrix:
    """Bartels-Stewart solve with the drift rescaled to unit norm.

    Scaling ``A`` and ``D`` by the same factor leaves ``V`` unchanged and keeps
    the Schur step well conditioned when ``omega_m`` dwarfs the damping rates.
    A couple of residual-correction passes then recover the digits the Schur
    step loses to that scale gap; tiny negativities live in those digits.
    """
    verdict = check_stability(model)
    if not verdict.stable:
        raise UnstableSystem(spectral_abscissa=verdict.spectral_abscissa)
    scale = np.linalg.norm(model.A, 2)
    if scale == 0:
        scale = 1.0
    V = solve_continuous_lyapunov(model.A / scale, -model.D / scale)
    V = 0.5 * (V + V.T)
    for _ in range(REFINE_STEPS):
        R = model.A @ V + V @ model.A.T + model.D
        dV = solve_continuous_lyapunov(model.A / scale, -R / scale)
        V = V + 0.5 * (dV + dV.T)
    res = lyapunov_residual(model, V)
    target = RESIDUAL_RTOL * max(np.linalg.norm(model.D, "fro"), 1.0)
    if res > target:
        raise IllConditioned(res, target)
    return CovarianceMatrix(V=V, modes=tuple(getattr(model, "modes", ())))
