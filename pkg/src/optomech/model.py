"""Physical parameters and derived constants of a double-longitudinal-mode
optomechanical cavity.

All rates are stored in rad/s after ingest. The mechanical frequency is
fixed by the geometry to half the free spectral range, ``omega_m = pi c / 2L``,
and the two optical modes sit one free spectral range apart,
``omega_2 = omega_1 + 2 omega_m``.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonPhysicalParameter, SchemeMismatch

# CODATA 2018, 9 significant digits.
HBAR = 1.05457182e-34  # J s
K_B = 1.38064900e-23  # J / K
C_LIGHT = 299792458.0  # m / s

TWO_PI = 2.0 * math.pi


class FrequencyUnit(str, enum.Enum):
    RAD_PER_S = "rad_per_s"
    HZ = "hz"


class Scheme(str, enum.Enum):
    SINGLE = "single"
    TWO_CAVITY_BS = "two-cavity-bs"
    DUAL_POLARIZATION = "dual-polarization"


# Fields that carry a rate and are scaled by 2 pi when given in Hz.
RATE_FIELDS = ("kappa", "gamma_m", "detuning_2", "g0_override")


@dataclass(frozen=True)
class SystemParams:
    """User-facing inputs for one cavity.

    ``kappa`` and ``gamma_m`` are tuples; a single value is broadcast to every
    optical (mechanical) mode of the scheme. ``detuning_2`` is the detuning of
    the upper optical mode, the lower one follows as ``detuning_2 - 2 omega_m``.
    ``g0_override`` replaces the geometric single-photon coupling when set,
    which is how the uncoupled limit ``g0 = 0`` is reached.
    """

    cavity_length: float = 0.01
    effective_mass: float = 5e-9
    wavelength: float = 1.33e-6
    input_power: float = 20e-3
    temperature: float = 0.01
    kappa: tuple = (1e6,)
    gamma_m: tuple = (1e5,)
    detuning_2: float | None = None
    frequency_unit: FrequencyUnit = FrequencyUnit.RAD_PER_S
    g0_override: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kappa", _as_tuple(self.kappa))
        object.__setattr__(self, "gamma_m", _as_tuple(self.gamma_m))
        object.__setattr__(self, "frequency_unit", FrequencyUnit(self.frequency_unit))

    def validate(self):
        for name in ("cavity_length", "effective_mass", "wavelength"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise NonPhysicalParameter(name, v, "must be > 0")
        for name in ("input_power", "temperature"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise NonPhysicalParameter(name, v, "must be >= 0")
        for name in ("kappa", "gamma_m"):
            vals = getattr(self, name)
            if len(vals) == 0:
                raise NonPhysicalParameter(name, vals, "at least one value required")
            for v in vals:
                if not (np.isfinite(v) and v > 0):
                    raise NonPhysicalParameter(name, vals, "all rates must be > 0")
        if self.detuning_2 is not None and not np.isfinite(self.detuning_2):
            raise NonPhysicalParameter("detuning_2", self.detuning_2, "must be finite")
        if self.g0_override is not None and not (
            np.isfinite(self.g0_override) and self.g0_override >= 0
        ):
            raise NonPhysicalParameter("g0_override", self.g0_override, "must be >= 0")
        return self

    def in_unit(self, unit) -> "SystemParams":
        """Return the same physical parameters expressed in ``unit``."""
        unit = FrequencyUnit(unit)
        if unit == self.frequency_unit:
            return self
        scale = TWO_PI if unit == FrequencyUnit.RAD_PER_S else 1.0 / TWO_PI
        changes = {"frequency_unit": unit}
        for name in RATE_FIELDS:
            v = getattr(self, name)
            if v is None:
                continue
            if isinstance(v, tuple):
                changes[name] = tuple(x * scale for x in v)
            else:
                changes[name] = v * scale
        return dataclasses.replace(self, **changes)

    def ingest(self) -> "SystemParams":
        """Validate and convert every rate to rad/s."""
        return self.validate().in_unit(FrequencyUnit.RAD_PER_S)

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["kappa"] = list(self.kappa)
        d["gamma_m"] = list(self.gamma_m)
        d["frequency_unit"] = self.frequency_unit.value
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SystemParams":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            from .errors import ConfigError

            raise ConfigError(f"unknown parameter key(s): {', '.join(unknown)}")
        return cls(**data)


def _as_tuple(v):
    if np.isscalar(v):
        return (float(v),)
    return tuple(float(x) for x in v)


def mechanical_frequency(cavity_length: float) -> float:
    """Half the free spectral range, rad/s."""
    return math.pi * C_LIGHT / (2.0 * cavity_length)


def bose_occupation(omega: float, temperature: float) -> float:
    if temperature <= 0:
        return 0.0
    x = HBAR * omega / (K_B * temperature)
    if x > 700:
        return 0.0
    return 1.0 / math.expm1(x)


@dataclass(frozen=True)
class DerivedConstants:
    """Everything the dynamics needs, in rad/s.

    Optical arrays are indexed by mode (``omega[0]`` is mode 1). For the dual
    polarization cavity the four modes are ordered H-low, H-high, V-low,
    V-high, so ``omega[2] == omega[0]`` and ``omega[3] == omega[1]``.
    """

    omega_m: float
    omega: np.ndarray
    g0: float
    eta: np.ndarray
    nbar: float
    delta: np.ndarray
    kappa: np.ndarray
    gamma_m: float
    params: SystemParams = field(repr=False, compare=False, default=None)

    @property
    def n_optical(self) -> int:
        return len(self.omega)

    def replace(self, **changes) -> "DerivedConstants":
        return dataclasses.replace(self, **changes)


def _broadcast(values, n, name):
    if len(values) == 1:
        return np.full(n, values[0])
    if len(values) == n:
        return np.asarray(values, dtype=float)
    if n == 4 and len(values) == 2:
        # same-frequency modes of the two polarizations share a linewidth
        return np.asarray(values * 2, dtype=float)
    raise NonPhysicalParameter(name, values, f"expected 1 or {n} values")


def derive_constants(params: SystemParams, n_optical: int = 2) -> DerivedConstants:
    """Derived constants for one cavity with ``n_optical`` modes (2 or 4)."""
    p = params.ingest()
    if n_optical not in (2, 4):
        raise ValueError("n_optical must be 2 or 4")
    omega_m = mechanical_frequency(p.cavity_length)
    w1 = TWO_PI * C_LIGHT / p.wavelength
    w2 = w1 + 2.0 * omega_m
    omega = np.array([w1, w2] * (n_optical // 2))

    if p.g0_override is not None:
        g0 = float(p.g0_override)
    else:
        g0 = math.sqrt(HBAR * w1 * w2 / (p.effective_mass * omega_m)) / p.cavity_length

    kappa = _broadcast(p.kappa, n_optical, "kappa")
    eta = np.sqrt(2.0 * p.input_power * kappa / (HBAR * omega))

    d2 = omega_m if p.detuning_2 is None else p.detuning_2
    d1 = d2 - 2.0 * omega_m
    delta = np.array([d1, d2] * (n_optical // 2))

    return DerivedConstants(
        omega_m=omega_m,
        omega=omega,
        g0=g0,
        eta=eta,
        nbar=bose_occupation(omega_m, p.temperature),
        delta=delta,
        kappa=kappa,
        gamma_m=float(p.gamma_m[0]),
        params=p,
    )


def scheme_params(params: SystemParams, scheme, n_cavities: int = 1):
    """Per-cavity ``(params, constants)`` pairs for a scheme.

    Every cavity in a multi-cavity arrangement is an identical copy, so modes
    of equal index in different cavities share frequency and detuning.
    """
    scheme = Scheme(scheme)
    if n_cavities < 1:
        raise SchemeMismatch(f"n_cavities must be >= 1, got {n_cavities}")
    if scheme == Scheme.SINGLE and n_cavities != 1:
        raise SchemeMismatch("single scheme requires exactly one cavity")
    if scheme == Scheme.TWO_CAVITY_BS and n_cavities < 2:
        raise SchemeMismatch("two-cavity-bs scheme requires at least two cavities")
    n_opt = 4 if scheme == Scheme.DUAL_POLARIZATION else 2
    p = params.ingest()
    dc = derive_constants(p, n_optical=n_opt)
    return [(p, dc) for _ in range(n_cavities)]


def detuning_for_ratio(params: SystemParams, ratio: float) -> SystemParams:
    """Set ``detuning_2 = ratio * omega_m`` in the params' own unit."""
    wm = mechanical_frequency(params.cavity_length)
    if params.frequency_unit == FrequencyUnit.HZ:
        wm /= TWO_PI
    return params.replace(detuning_2=ratio * wm)
