"""Linearized quadrature dynamics ``du/dt = A u + n`` around the working point.

Quadrature ordering is one ``(q, p)`` pair per mechanical mode followed by one
``(X, Y)`` pair per optical mode, with ``X = (a + a^dag)/sqrt2``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .model import DerivedConstants
from .steadystate import SteadyState


class ConfigTag(str, enum.Enum):
    SINGLE_INTRACAVITY = "single-intracavity"
    OUTPUT_FOLDED = "output-folded"
    DUAL_POLARIZATION = "dual-polarization"


@dataclass(frozen=True)
class LinearModel:
    A: np.ndarray
    D: np.ndarray
    modes: tuple
    config_tag: ConfigTag

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @property
    def ordering(self) -> list:
        """Quadrature label of every row."""
        out = []
        for m in self.modes:
            if m.startswith("m"):
                out += [f"q_{m}", f"p_{m}"]
            else:
                out += [f"X_{m}", f"Y_{m}"]
        return out


@dataclass(frozen=True)
class LinearizedCouplings:
    G: np.ndarray  # one per coupled optical pair
    g: np.ndarray
    delta_prime: np.ndarray
    g0qs: float


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    spectral_abscissa: float

    def __bool__(self):
        return self.stable


def couplings(dc: DerivedConstants, ss: SteadyState) -> LinearizedCouplings:
    q = float(ss.q_s[0])
    pairs = range(0, dc.n_optical, 2)
    sums = np.array([ss.alpha[j] + ss.alpha[j + 1] for j in pairs])
    return LinearizedCouplings(
        G=np.sqrt(2) * dc.g0 * sums.real,
        g=np.sqrt(2) * dc.g0 * sums.imag,
        delta_prime=dc.delta - dc.g0 * q,
        g0qs=dc.g0 * q,
    )


def _drift(dc: DerivedConstants, c: LinearizedCouplings, optical_diag) -> np.ndarray:
    n = 2 + 2 * dc.n_optical
    A = np.zeros((n, n))
    A[0, 1] = dc.omega_m
    A[1, 0] = -dc.omega_m
    A[1, 1] = -dc.gamma_m
    for k, j0 in enumerate(range(0, dc.n_optical, 2)):
        G, g = c.G[k], c.g[k]
        for j in (j0, j0 + 1):
            x, y = 2 + 2 * j, 3 + 2 * j
            A[1, x], A[1, y] = G, g
            A[x, 0], A[y, 0] = -g, G
            A[x, x] = A[y, y] = optical_diag[j]
            A[x, y] = c.delta_prime[j]
            A[y, x] = -c.delta_prime[j]
        # static beam-splitter coupling between the two modes of the pair
        x1, y1, x2, y2 = 2 + 2 * j0, 3 + 2 * j0, 4 + 2 * j0, 5 + 2 * j0
        A[x1, y2] = A[x2, y1] = -c.g0qs
        A[y1, x2] = A[y2, x1] = c.g0qs
    return A


def _diffusion(dc: DerivedConstants, shared_input_noise: bool = False) -> np.ndarray:
    """Diffusion matrix; thermal mechanical bath plus optical vacuum.

    With ``shared_input_noise`` every optical mode is fed by the same input
    operator, giving ``sqrt(kappa_i kappa_j)`` cross terms. The drift carries no
    matching cross-damping, so that variant violates the uncertainty relation
    at order ``kappa / omega_m`` and is off by default.
    """
    n = 2 + 2 * dc.n_optical
    D = np.zeros((n, n))
    D[1, 1] = dc.gamma_m * (2 * dc.nbar + 1)
    if shared_input_noise:
        block = np.sqrt(np.outer(dc.kappa, dc.kappa))
    else:
        block = np.diag(dc.kappa)
    D[2::2, 2::2] = block
    D[3::2, 3::2] = block
    return D


def _modes(n_optical, offset=0, mech="m"):
    return (mech,) + tuple(f"a{offset + j + 1}" for j in range(n_optical))


def build_single(dc: DerivedConstants, ss: SteadyState,
                 shared_input_noise: bool = False) -> LinearModel:
    """6x6 intracavity model of one two-mode cavity."""
    c = couplings(dc, ss)
    return LinearModel(
        A=_drift(dc, c, -dc.kappa),
        D=_diffusion(dc, shared_input_noise),
        modes=_modes(2),
        config_tag=ConfigTag.SINGLE_INTRACAVITY,
    )


def build_dual_polarization(dc: DerivedConstants, ss: SteadyState,
                            shared_input_noise: bool = False) -> LinearModel:
    """10x10 model: one mirror, two polarizations of two longitudinal modes."""
    if dc.n_optical != 4:
        raise ValueError("dual polarization model needs four optical modes")
    c = couplings(dc, ss)
    return LinearModel(
        A=_drift(dc, c, -dc.kappa),
        D=_diffusion(dc, shared_input_noise),
        modes=_modes(4),
        config_tag=ConfigTag.DUAL_POLARIZATION,
    )


def build_output_folded_one(dc: DerivedConstants, ss: SteadyState, index: int = 1,
                            shared_input_noise: bool = False) -> LinearModel:
    """Drift of the output fields of cavity ``index`` (1-based).

    The optical diagonal is ``-kappa + sqrt(2 kappa)``, both terms evaluated in
    rad/s.
    """
    c = couplings(dc, ss)
    return LinearModel(
        A=_drift(dc, c, -dc.kappa + np.sqrt(2 * dc.kappa)),
        D=_diffusion(dc, shared_input_noise),
        modes=_modes(2, offset=2 * (index - 1), mech=f"m{index}"),
        config_tag=ConfigTag.OUTPUT_FOLDED,
    )


def build_output_folded(dc_pair, ss_pair, shared_input_noise: bool = False):
    return tuple(
        build_output_folded_one(dc, ss, index=i + 1, shared_input_noise=shared_input_noise)
        for i, (dc, ss) in enumerate(zip(dc_pair, ss_pair))
    )


def relabel(model: LinearModel, cavity_index: int) -> LinearModel:
    """Copy of ``model`` with mode labels numbered for cavity ``cavity_index``."""
    n_opt = len(model.modes) - 1
    return LinearModel(
        A=model.A,
        D=model.D,
        modes=_modes(n_opt, offset=n_opt * (cavity_index - 1), mech=f"m{cavity_index}"),
        config_tag=model.config_tag,
    )


def check_stability(model) -> StabilityVerdict:
    A = model.A if isinstance(model, LinearModel) else np.asarray(model)
    abscissa = float(np.max(np.linalg.eigvals(A).real))
    return StabilityVerdict(stable=abscissa < 0, spectral_abscissa=abscissa)
