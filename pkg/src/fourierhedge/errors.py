"""Exception types raised across the package."""


class FourierHedgeError(Exception):
    """Base class for all package errors."""


class ModelError(FourierHedgeError, ValueError):
    """Invalid model parameters or grids."""


class SCViolated(FourierHedgeError):
    """The drift of X is not absolutely continuous w.r.t. its variance measure."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class QuadratureFailure(FourierHedgeError):
    """Adaptive refinement of a payoff-measure integral did not converge."""


class TruncationTooTight(FourierHedgeError):
    """A truncated Fourier density does not reproduce its payoff accurately enough."""


class NegativeVariance(FourierHedgeError):
    """A computed hedging-error variance is negative beyond rounding tolerance."""


class UnsupportedModel(FourierHedgeError):
    """No exact path sampler exists for the requested model."""


class GridMismatch(FourierHedgeError, UserWarning):
    """Precomputed strategy tables do not cover the simulated state range."""


class ConfigError(FourierHedgeError):
    """Malformed run configuration; carries key and line diagnostics when known."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        full = f"{message} ({', '.join(where)})" if where else message
        super().__init__(full)
        self.key = key
        self.line = line
