"""Exception hierarchy. CLI exit codes are attached to the classes."""


class OptomechError(Exception):
    exit_code = 1


class ConfigError(OptomechError, ValueError):
    exit_code = 2


class NonPhysicalParameter(ConfigError):
    def __init__(self, field, value, reason=""):
        self.field = field
        self.value = value
        msg = f"{field}={value!r} is not physical"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class SchemeMismatch(ConfigError):
    pass


class UnknownPreset(ConfigError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class BadIndices(OptomechError, ValueError):
    exit_code = 2


class IndexOutOfRange(BadIndices, IndexError):
    pass


class DimensionMismatch(OptomechError, ValueError):
    exit_code = 2


class NoConvergence(OptomechError, RuntimeError):
    exit_code = 3

    def __init__(self, msg, residual=float("nan")):
        self.residual = residual
        super().__init__(f"{msg} (last residual {residual:.3e})")


class OscillationDetected(NoConvergence):
    pass


class UnstableSystem(OptomechError, RuntimeError):
    exit_code = 4

    def __init__(self, msg="drift matrix is not Hurwitz", spectral_abscissa=float("nan")):
        self.spectral_abscissa = spectral_abscissa
        super().__init__(f"{msg} (spectral abscissa {spectral_abscissa:.6e})")


class IllConditioned(OptomechError, RuntimeError):
    exit_code = 3

    def __init__(self, residual, target):
        self.residual = residual
        self.target = target
        super().__init__(f"Lyapunov residual {residual:.3e} exceeds target {target:.3e}")


class UnphysicalCM(OptomechError, ValueError):
    pass
