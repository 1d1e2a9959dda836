"""Steady-state Gaussian entanglement in double-longitudinal-mode cavity optomechanics.

Pipeline: parameters -> classical working point -> linearized drift and
diffusion -> Lyapunov covariance matrix -> pairwise logarithmic negativity,
optionally through beam-splitter networks joining several cavities.
"""

__version__ = "0.1.0"

from .dynamics import (
    LinearModel,
    build_dual_polarization,
    build_output_folded,
    build_single,
    check_stability,
)
from .entanglement import (
    EntanglementReport,
    classify_structure,
    edge_classes,
    log_negativity,
    pairwise_matrix,
    reduce_cm,
)
from .errors import (
    ConfigError,
    IllConditioned,
    NoConvergence,
    OptomechError,
    UnphysicalCM,
    UnstableSystem,
)
from .lyapunov import CovarianceMatrix, solve_lyapunov
from .model import DerivedConstants, FrequencyUnit, Scheme, SystemParams, derive_constants
from .network import (
    BeamSplitterSpec,
    ChainScheme,
    ChainSpec,
    IOMode,
    bs_symplectic,
    build_chain,
    compose,
    make_chain,
)
from .steadystate import SteadyState, solve_self_consistent, solve_single_cavity
from .sweep import Axis, SweepResult, SweepSpec, preset, run_sweep

__all__ = [
    "Axis", "BeamSplitterSpec", "ChainScheme", "ChainSpec", "ConfigError", "CovarianceMatrix",
    "DerivedConstants", "EntanglementReport", "FrequencyUnit", "IOMode", "IllConditioned",
    "LinearModel", "NoConvergence", "OptomechError", "Scheme", "SteadyState", "SweepResult",
    "SweepSpec", "SystemParams", "UnphysicalCM", "UnstableSystem", "bs_symplectic",
    "build_chain", "build_dual_polarization", "build_output_folded", "build_single",
    "check_stability", "classify_structure", "compose", "derive_constants", "edge_classes",
    "log_negativity", "make_chain", "pairwise_matrix", "preset", "reduce_cm", "run_sweep",
    "solve_lyapunov", "solve_self_consistent", "solve_single_cavity",
]
