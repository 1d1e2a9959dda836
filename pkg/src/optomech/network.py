"""Beam-splitter networks joining the outputs of identical cavities.

A beam splitter with transmission ``cos(theta)`` and phase ``phi`` maps
``a -> e^{i phi}(cos a - sin b)`` and ``b -> sin a + cos b``. On quadratures the
phase factor is a rotation ``R(phi)`` of the first output port, so the 4x4
block reads ``[[cos R, -sin R], [sin I, cos I]]``.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.linalg import block_diag

from .dynamics import build_dual_polarization, build_output_folded_one, build_single, relabel
from .entanglement import DEFAULT_THRESHOLD, EntanglementReport, pairwise_matrix
from .errors import BadIndices, DimensionMismatch
from .lyapunov import CovarianceMatrix, solve_lyapunov
from .model import Scheme, SystemParams, scheme_params
from .steadystate import solve_self_consistent, solve_single_cavity


class ChainScheme(str, enum.Enum):
    TWO_MODE = "two-mode"
    FOUR_MODE = "four-mode"

    @property
    def n_optical(self) -> int:
        return 2 if self is ChainScheme.TWO_MODE else 4


class IOMode(str, enum.Enum):
    FOLDED = "folded"
    INTRACAVITY = "intracavity"


@dataclass(frozen=True)
class BeamSplitterSpec:
    theta: float
    phi: float
    mode_a: int
    mode_b: int


@dataclass(frozen=True)
class ChainSpec:
    n_cavities: int
    scheme: ChainScheme = ChainScheme.TWO_MODE
    bs_list: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "scheme", ChainScheme(self.scheme))
        object.__setattr__(self, "bs_list", tuple(self.bs_list))

    @property
    def modes_per_cavity(self) -> int:
        return 1 + self.scheme.n_optical

    def validate(self):
        if self.n_cavities < 1:
            raise BadIndices("a chain needs at least one cavity")
        n_total = self.n_cavities * self.modes_per_cavity
        for bs in self.bs_list:
            _check_indices(bs, n_total)
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["scheme"] = self.scheme.value
        d["bs_list"] = [asdict(bs) for bs in self.bs_list]
        return d


def make_chain(n_cavities, scheme=ChainScheme.TWO_MODE, theta=np.pi / 4, phi=np.pi / 2,
               line: int = 0) -> ChainSpec:
    """Cascade of ``n_cavities - 1`` beam splitters.

    Splitter ``k`` joins optical mode ``line`` of cavity ``k`` (already mixed by
    splitter ``k - 1``) with the same mode of cavity ``k + 1``. ``theta`` and
    ``phi`` may be scalars or per-splitter sequences.
    """
    scheme = ChainScheme(scheme)
    per = 1 + scheme.n_optical
    thetas = np.broadcast_to(np.asarray(theta, dtype=float), (max(n_cavities - 1, 0),))
    phis = np.broadcast_to(np.asarray(phi, dtype=float), (max(n_cavities - 1, 0),))
    bs = tuple(
        BeamSplitterSpec(float(thetas[k]), float(phis[k]),
                         k * per + 1 + line, (k + 1) * per + 1 + line)
        for k in range(n_cavities - 1)
    )
    return ChainSpec(n_cavities=n_cavities, scheme=scheme, bs_list=bs).validate()


def _check_indices(spec, n_modes_total):
    a, b = spec.mode_a, spec.mode_b
    if a == b or not (0 <= a < n_modes_total and 0 <= b < n_modes_total):
        raise BadIndices(f"beam splitter modes ({a}, {b}) invalid for {n_modes_total} modes")


def rotation(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def bs_symplectic(spec: BeamSplitterSpec, n_modes_total: int) -> np.ndarray:
    _check_indices(spec, n_modes_total)
    S = np.eye(2 * n_modes_total)
    c, s = np.cos(spec.theta), np.sin(spec.theta)
    R = rotation(spec.phi)
    a = slice(2 * spec.mode_a, 2 * spec.mode_a + 2)
    b = slice(2 * spec.mode_b, 2 * spec.mode_b + 2)
    S[a, a] = c * R
    S[a, b] = -s * R
    S[b, a] = s * np.eye(2)
    S[b, b] = c * np.eye(2)
    return S


def compose(V_blocks, bs_list=()) -> CovarianceMatrix:
    """Block-diagonal stack of cavity CMs followed by the splitters in order."""
    mats, modes = [], []
    for blk in V_blocks:
        if isinstance(blk, CovarianceMatrix):
            mats.append(blk.V)
            modes.extend(blk.modes)
        else:
            mats.append(np.asarray(blk, dtype=float))
        m = mats[-1]
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise DimensionMismatch(f"covariance block of shape {m.shape}")
    V = block_diag(*mats)
    n = V.shape[0] // 2
    for spec in bs_list:
        if max(spec.mode_a, spec.mode_b) >= n:
            raise DimensionMismatch(f"splitter on modes ({spec.mode_a}, {spec.mode_b}) "
                                    f"but only {n} modes")
        S = bs_symplectic(spec, n)
        V = S @ V @ S.T
    V = 0.5 * (V + V.T)
    return CovarianceMatrix(V=V, modes=tuple(modes) if len(modes) == n else ())


def cavity_models(params: SystemParams, chain: ChainSpec, io_mode=IOMode.FOLDED):
    """Steady states and linear models of every cavity in the chain."""
    io_mode = IOMode(io_mode)
    n = chain.n_cavities
    if chain.scheme is ChainScheme.FOUR_MODE:
        pairs = scheme_params(params, Scheme.DUAL_POLARIZATION, 1) * n
        ss = solve_self_consistent(pairs[0][1], Scheme.DUAL_POLARIZATION)
        models = [relabel(build_dual_polarization(dc, ss), k + 1)
                  for k, (_, dc) in enumerate(pairs)]
    else:
        pairs = scheme_params(params, Scheme.TWO_CAVITY_BS if n > 1 else Scheme.SINGLE, n)
        ss = solve_single_cavity(pairs[0][1])
        if io_mode is IOMode.FOLDED:
            models = [build_output_folded_one(dc, ss, index=k + 1)
                      for k, (_, dc) in enumerate(pairs)]
        else:
            models = [relabel(build_single(dc, ss), k + 1) for k, (_, dc) in enumerate(pairs)]
    return [ss] * n, models


def build_chain(params: SystemParams, chain: ChainSpec, io_mode=IOMode.FOLDED,
                threshold: float = DEFAULT_THRESHOLD):
    """Steady state -> models -> per-cavity Lyapunov -> splitters -> report.

    The report covers the optical modes only; ``report.groups`` holds the
    cavity index of every mode.
    """
    chain.validate()
    _, models = cavity_models(params, chain, io_mode)
    blocks = [solve_lyapunov(m) for m in models]
    cm = compose(blocks, chain.bs_list)
    per = chain.modes_per_cavity
    optical = [k * per + j for k in range(chain.n_cavities) for j in range(1, per)]
    groups = [k for k in range(chain.n_cavities) for _ in range(1, per)]
    report = pairwise_matrix(cm.V, labels=[cm.modes[i] for i in optical],
                             threshold=threshold, groups=groups, modes=optical)
    return cm, report


def chain_report_from_blocks(blocks, chain: ChainSpec,
                             threshold: float = DEFAULT_THRESHOLD) -> EntanglementReport:
    """Compose precomputed cavity CMs and report on their optical modes."""
    cm = compose(blocks, chain.bs_list)
    per = chain.modes_per_cavity
    optical = [k * per + j for k in range(chain.n_cavities) for j in range(1, per)]
    groups = [k for k in range(chain.n_cavities) for _ in range(1, per)]
    labels = [cm.modes[i] if cm.modes else f"a{n + 1}" for n, i in enumerate(optical)]
    return pairwise_matrix(cm.V, labels=labels, threshold=threshold, groups=groups,
                           modes=optical)
