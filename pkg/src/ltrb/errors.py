"""Exception hierarchy shared across the package."""


class LTRBError(Exception):
    """Base class for all package errors."""


class InvalidArgument(LTRBError, ValueError):
    pass


class InvalidMesh(LTRBError, ValueError):
    pass


class InvalidOperator(LTRBError):
    """Raised when a matrix expected to be SPD fails to factorize."""


class NumericalFailure(LTRBError):
    pass


class IncompatibleBasis(LTRBError):
    """A persisted basis does not belong to the current discretization."""


class ConfigError(LTRBError):
    pass
