"""Exception types raised by the solver and the experiment harness."""


class FsavError(Exception):
    """Base class for solver-side failures."""


class NonpositiveSavEnergy(FsavError):
    """E(P, Q) + C0 is not positive, so the auxiliary variable is undefined.

    Raise ``c0`` in the model parameters (typical for defocusing or
    negative-potential problems with small data).
    """


class SingularDenominator(FsavError):
    """|1 + (tau/4) chi| fell below the guard; reduce the time step."""

    def __init__(self, value, guard):
        self.value = value
        self.guard = guard
        super().__init__(
            f"rank-one denominator 1 + (tau/4)*chi = {value:.3e} is below guard {guard:.1e}; "
            "reduce tau"
        )


class NoConvergence(FsavError):
    """Fixed-point iteration of the implicit comparator did not converge."""

    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"fixed-point iteration did not converge in {iterations} iterations "
            f"(last relative change {residual:.3e})"
        )


class NonIntegerStepCount(FsavError):
    """The final time is not an integer multiple of the time step."""


class DegenerateReference(FsavError):
    """Initial energy or mass too close to zero to form a relative drift."""


class ConfigError(ValueError):
    """Base class for configuration problems; ``line`` is 1-based or None."""

    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class UnknownKey(ConfigError):
    pass


class ConfigTypeError(ConfigError):
    pass


class ConstraintViolation(ConfigError):
    pass
