"""Parameter sweeps over the steady-state entanglement pipeline, and figure presets.

Every grid point runs the whole pipeline independently, so points can be
farmed out to worker processes. Rows always come back in row-major grid order.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .dynamics import build_dual_polarization, build_single, check_stability
from .entanglement import DEFAULT_THRESHOLD, edge_classes, pairwise_matrix
from .errors import ConfigError, OptomechError, UnknownPreset
from .lyapunov import lyapunov_residual, solve_lyapunov
from .model import Scheme, SystemParams, derive_constants, detuning_for_ratio
from .network import ChainScheme, ChainSpec, IOMode, cavity_models, compose, make_chain
from .steadystate import solve_self_consistent, solve_single_cavity

AXIS_NAMES = ("detuning_ratio", "kappa", "gamma_m", "temperature", "theta", "phi")
DEFAULT_POINTS_1D = 201
DEFAULT_POINTS_2D = 101


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    n_points: int = DEFAULT_POINTS_1D
    scale: str = "linear"

    def validate(self):
        if self.name not in AXIS_NAMES:
            raise ConfigError(f"unknown sweep axis {self.name!r}; choose from {AXIS_NAMES}")
        if self.n_points < 2:
            raise ConfigError(f"axis {self.name}: n_points must be >= 2")
        if not self.min < self.max:
            raise ConfigError(f"axis {self.name}: min must be < max")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"axis {self.name}: scale must be linear or log")
        if self.scale == "log" and self.min <= 0:
            raise ConfigError(f"axis {self.name}: log scale needs min > 0")
        return self

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.n_points)
        return np.linspace(self.min, self.max, self.n_points)


@dataclass(frozen=True)
class SweepSpec:
    """A 1-D or 2-D grid over the pipeline of one scheme.

    ``fixed`` holds the non-swept knobs ``detuning_ratio``, ``theta`` and
    ``phi``. Observables are pair names such as ``E_01``, or ``all_pairs``,
    ``shape_label`` and ``stability``.
    """

    base: SystemParams
    axes: tuple
    observables: tuple = ("all_pairs", "stability")
    scheme: Scheme = Scheme.SINGLE
    fixed: dict = field(default_factory=dict)
    io_mode: IOMode = IOMode.FOLDED
    threshold: float = DEFAULT_THRESHOLD
    name: str = "custom"
    notes: str = ""

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "observables", tuple(self.observables))
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "io_mode", IOMode(self.io_mode))

    def validate(self):
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError("a sweep needs one or two axes")
        for ax in self.axes:
            ax.validate()
        if len({ax.name for ax in self.axes}) != len(self.axes):
            raise ConfigError("sweep axes must be distinct")
        self.base.validate()
        return self

    def grid(self):
        return list(itertools.product(*(ax.values() for ax in self.axes)))


@dataclass(frozen=True)
class ChainPreset:
    base: SystemParams
    chain: ChainSpec
    io_mode: IOMode = IOMode.FOLDED
    threshold: float = DEFAULT_THRESHOLD
    name: str = "chain"
    notes: str = ""


@dataclass
class SweepResult:
    columns: list
    rows: list
    metadata: dict

    def column(self, name) -> np.ndarray:
        return np.array([_as_float(r.get(name)) for r in self.rows])


def _as_float(v):
    if v is None or v == "":
        return math.nan
    return float(v)


# -- point evaluation ------------------------------------------------------------

def point_params(spec: SweepSpec, values) -> tuple:
    """Resolved ``SystemParams`` and knob dict at one grid point."""
    knobs = {"detuning_ratio": 1.0, "theta": math.pi / 4, "phi": math.pi / 2}
    knobs.update(spec.fixed)
    p = spec.base
    for ax, v in zip(spec.axes, values):
        v = float(v)
        if ax.name in ("detuning_ratio", "theta", "phi"):
            knobs[ax.name] = v
        elif ax.name in ("kappa", "gamma_m"):
            p = p.replace(**{ax.name: (v,)})
        else:
            p = p.replace(temperature=v)
    if p.detuning_2 is None or "detuning_ratio" in spec.fixed or any(
            ax.name == "detuning_ratio" for ax in spec.axes):
        p = detuning_for_ratio(p, knobs["detuning_ratio"])
    return p, knobs


def evaluate_point(spec: SweepSpec, values) -> dict:
    row = {ax.name: float(v) for ax, v in zip(spec.axes, values)}
    try:
        p, knobs = point_params(spec, values)
        row.update(_pipeline(spec, p, knobs))
    except OptomechError as exc:
        row.update(stable="", error=f"{type(exc).__name__}: {exc}")
    return row


def _pipeline(spec: SweepSpec, p: SystemParams, knobs) -> dict:
    if spec.scheme == Scheme.SINGLE:
        dc = derive_constants(p)
        ss = solve_single_cavity(dc)
        models = [build_single(dc, ss)]
        report_of = lambda blocks: pairwise_matrix(blocks[0], threshold=spec.threshold)  # noqa: E731
    elif spec.scheme == Scheme.DUAL_POLARIZATION:
        dc = derive_constants(p, n_optical=4)
        ss = solve_self_consistent(dc, Scheme.DUAL_POLARIZATION)
        models = [build_dual_polarization(dc, ss)]
        report_of = lambda blocks: pairwise_matrix(blocks[0], threshold=spec.threshold)  # noqa: E731
    else:
        chain = make_chain(2, ChainScheme.TWO_MODE, knobs["theta"], knobs["phi"])
        ss_list, models = cavity_models(p, chain, spec.io_mode)
        ss = ss_list[0]

        def report_of(blocks):
            cm = compose(blocks, chain.bs_list)
            optical = [1, 2, 4, 5]
            return pairwise_matrix(cm.V, labels=[cm.modes[i] for i in optical],
                                   threshold=spec.threshold, modes=optical,
                                   groups=[0, 0, 1, 1])

    verdicts = [check_stability(m) for m in models]
    out = {
        "stable": int(all(v.stable for v in verdicts)),
        "spectral_abscissa": max(v.spectral_abscissa for v in verdicts),
        "ss_residual": float(ss.residual),
    }
    if not out["stable"]:
        out["error"] = "unstable"
        return out
    blocks = [solve_lyapunov(m) for m in models]
    out["lyapunov_residual"] = max(lyapunov_residual(m, b) for m, b in zip(models, blocks))
    report = report_of(blocks)
    out.update(report.observables())
    out["shape_label"] = report.shape_label
    out["edges"] = " ".join(f"{a}-{b}" for a, b in report.edge_labels())
    return out


def _observable_columns(spec: SweepSpec) -> list:
    if spec.scheme == Scheme.SINGLE:
        labels = ("m", "a1", "a2")
    elif spec.scheme == Scheme.DUAL_POLARIZATION:
        labels = ("m", "a1", "a2", "a3", "a4")
    else:
        labels = ("a1", "a2", "a3", "a4")
    from .entanglement import pair_name

    all_pairs = [pair_name(labels, i, j)
                 for i, j in itertools.combinations(range(len(labels)), 2)]
    cols = []
    for obs in spec.observables:
        if obs == "all_pairs":
            cols += [c for c in all_pairs if c not in cols]
        elif obs == "shape_label":
            cols += ["shape_label", "edges"]
        elif obs == "stability":
            continue
        elif obs in all_pairs:
            if obs not in cols:
                cols.append(obs)
        else:
            raise ConfigError(f"unknown observable {obs!r} for scheme {spec.scheme.value}; "
                              f"choose from {all_pairs + ['all_pairs', 'shape_label', 'stability']}")
    return cols


def _evaluate_chunk(args):
    spec, values = args
    return evaluate_point(spec, values)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Evaluate every grid point; per-point failures land in the ``error`` column."""
    spec.validate()
    obs_cols = _observable_columns(spec)
    columns = ([ax.name for ax in spec.axes] + obs_cols
               + ["stable", "spectral_abscissa", "ss_residual", "lyapunov_residual", "error"])
    grid = spec.grid()
    if jobs <= 1 or len(grid) < 2:
        raw = [evaluate_point(spec, v) for v in grid]
    else:
        chunk = max(1, len(grid) // (4 * jobs))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            raw = list(pool.map(_evaluate_chunk, [(spec, v) for v in grid], chunksize=chunk))
    rows = []
    for r in raw:
        row = {c: r.get(c, "") for c in columns}
        if r.get("stable") == 0:
            for c in obs_cols:
                row[c] = math.nan if c.startswith("E_") else ""
        rows.append(row)
    return SweepResult(columns=columns, rows=rows, metadata=sweep_metadata(spec))


def sweep_metadata(spec: SweepSpec) -> dict:
    return {
        "preset": spec.name,
        "scheme": spec.scheme.value,
        "io_mode": spec.io_mode.value,
        "threshold": spec.threshold,
        "fixed": dict(spec.fixed),
        "axes": [vars(ax).copy() for ax in spec.axes],
        "observables": list(spec.observables),
        "params": spec.base.to_dict(),
        "frequency_unit": spec.base.frequency_unit.value,
        "code_version": __version__,
        "notes": spec.notes,
    }


def run_chain_preset(preset: ChainPreset):
    """Composed CM and report for a chain preset."""
    from .network import build_chain

    return build_chain(preset.base, preset.chain, preset.io_mode, preset.threshold)


def chain_summary(report) -> dict:
    classes = edge_classes(report)
    return {k: len(v) for k, v in classes.items()}


# -- presets ---------------------------------------------------------------------

FIG2 = SystemParams(
    cavity_length=0.01, effective_mass=5e-9, wavelength=1.33e-6, input_power=20e-3,
    temperature=0.01, kappa=(1e6,), gamma_m=(1e5,),
)
FIG7 = FIG2.replace(gamma_m=(1e4,))

_DET = Axis("detuning_ratio", 0.9, 1.5, DEFAULT_POINTS_1D)
_DET2 = Axis("detuning_ratio", 0.9, 1.5, DEFAULT_POINTS_2D)
_KAPPA2 = Axis("kappa", 1e5, 1e8, DEFAULT_POINTS_2D, "log")
_GAMMA2 = Axis("gamma_m", 1e3, 1e6, DEFAULT_POINTS_2D, "log")
_PHI = Axis("phi", 0.0, math.pi, DEFAULT_POINTS_1D)
_RANGE_NOTE = "axis ranges chosen to bracket the visible features of the figure"


def _fig3(name, axes, obs):
    return SweepSpec(base=FIG2.replace(gamma_m=(1e4,)), axes=axes, observables=obs,
                     fixed={"detuning_ratio": 1.0}, name=name, notes=_RANGE_NOTE)


def _fig7(name, theta):
    return SweepSpec(base=FIG7, axes=(_PHI,), observables=("all_pairs", "shape_label", "stability"),
                     scheme=Scheme.TWO_CAVITY_BS,
                     fixed={"detuning_ratio": 1.0, "theta": theta}, name=name, notes=_RANGE_NOTE)


def _chain(name, n, scheme, theta, base):
    return ChainPreset(base=detuning_for_ratio(base, 1.0),
                       chain=make_chain(n, scheme, theta, math.pi / 2), name=name)


_OM = ("E_01", "E_02")
_OO = ("E_12",)

PRESETS = {
    "fig2": lambda: SweepSpec(base=FIG2, axes=(_DET,), observables=_OM + _OO + ("stability",),
                              name="fig2", notes=_RANGE_NOTE),
    "fig3a": lambda: _fig3("fig3a", (_KAPPA2, _GAMMA2), _OM),
    "fig3b": lambda: _fig3("fig3b", (_DET2, _KAPPA2), _OM),
    "fig3c": lambda: _fig3("fig3c", (_DET2, _GAMMA2), _OM),
    "fig3d": lambda: _fig3("fig3d", (_KAPPA2, _GAMMA2), _OO),
    "fig3e": lambda: _fig3("fig3e", (_DET2, _KAPPA2), _OO),
    "fig3f": lambda: _fig3("fig3f", (_DET2, _GAMMA2), _OO),
    "fig4a": lambda: SweepSpec(base=FIG2.replace(kappa=(1e7,)),
                               axes=(Axis("gamma_m", 1e3, 1e8, DEFAULT_POINTS_1D, "log"),),
                               observables=_OM, fixed={"detuning_ratio": 1.0}, name="fig4a",
                               notes=_RANGE_NOTE),
    "fig4b": lambda: SweepSpec(base=FIG2.replace(kappa=(1e7,)),
                               axes=(Axis("gamma_m", 1e3, 1e8, DEFAULT_POINTS_1D, "log"),),
                               observables=_OM, fixed={"detuning_ratio": 1.005}, name="fig4b",
                               notes=_RANGE_NOTE),
    "fig5a": lambda: SweepSpec(base=FIG2,
                               axes=(Axis("temperature", 1e-2, 1e3, DEFAULT_POINTS_1D, "log"),),
                               observables=_OM, fixed={"detuning_ratio": 1.0}, name="fig5a",
                               notes=_RANGE_NOTE),
    "fig5b": lambda: SweepSpec(base=FIG2,
                               axes=(Axis("temperature", 1e-2, 1e3, DEFAULT_POINTS_1D, "log"),),
                               observables=_OO, fixed={"detuning_ratio": 1.0}, name="fig5b",
                               notes=_RANGE_NOTE),
    "fig7a": lambda: _fig7("fig7a", math.pi / 8),
    "fig7b": lambda: _fig7("fig7b", math.pi / 4),
    "fig7c": lambda: _fig7("fig7c", 3 * math.pi / 8),
    "fig9": lambda: _chain("fig9", 3, ChainScheme.TWO_MODE, math.pi / 4, FIG7),
    "fig9a": lambda: _chain("fig9a", 3, ChainScheme.TWO_MODE, math.pi / 8, FIG7),
    "fig9b": lambda: _chain("fig9b", 3, ChainScheme.TWO_MODE, math.pi / 4, FIG7),
    "fig11": lambda: SweepSpec(base=FIG2, axes=(_DET,), scheme=Scheme.DUAL_POLARIZATION,
                               observables=("E_12", "E_34", "E_14", "E_23", "E_13", "E_24",
                                            "stability"),
                               name="fig11", notes=_RANGE_NOTE),
    "fig13": lambda: _chain("fig13", 3, ChainScheme.FOUR_MODE, math.pi / 4, FIG2),
    "fig13a": lambda: _chain("fig13a", 3, ChainScheme.FOUR_MODE, math.pi / 8, FIG2),
    "fig13b": lambda: _chain("fig13b", 3, ChainScheme.FOUR_MODE, math.pi / 4, FIG2),
}


def preset(name: str):
    try:
        return PRESETS[name]()
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
