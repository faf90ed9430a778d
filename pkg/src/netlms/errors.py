"""Exception types shared across the package."""


class NetlmsError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(NetlmsError):
    """An argument failed validation (shape, finiteness, range, ...)."""


class NoUniqueStationaryError(NetlmsError):
    """The transition matrix has no unique stationary distribution
    reachable within the iteration budget."""


class UnsupportedAnalyticError(NetlmsError):
    """No closed-form conditional expectation exists for this process;
    use the explicit Monte Carlo path instead."""


class UnobservableHorizonError(NetlmsError):
    """The accumulated information matrix is singular over the requested
    horizon, so the oracle parameter is not identified."""


class ConfigError(NetlmsError):
    """A config file failed to parse or validate.

    ``line`` is the 1-based line number of the first offending line when
    known, else ``None``.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
