"""Exception hierarchy shared across the package."""


class HomsrError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(HomsrError, ValueError):
    """An argument violates a documented precondition (non-finite input, bad range, ...)."""


class QuadratureError(HomsrError, RuntimeError):
    """Numerical integration failed its node-doubling convergence gate."""


class SamplingError(HomsrError, RuntimeError):
    """Rejection sampling became pathologically inefficient or did not terminate."""


class NonIdentifiableError(HomsrError, ValueError):
    """A requested parameter carries no Fisher information; the bound is undefined.

    The offending parameter name is stored in ``parameter``.
    """

    def __init__(self, parameter: str, message: str | None = None):
        self.parameter = parameter
        super().__init__(message or f"parameter {parameter!r} is not identifiable (zero information)")


class DiscretizationError(HomsrError, RuntimeError):
    """A discretized operator is too coarse to be trusted (e.g. negative eigenvalues)."""


class ConfigError(HomsrError, ValueError):
    """A scenario configuration file failed strict validation."""
