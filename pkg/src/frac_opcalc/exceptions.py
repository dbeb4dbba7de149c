"""Error hierarchy shared by the services and the command line."""


class FracOpcalcError(Exception):
    """Base class for all library errors."""


class DomainError(FracOpcalcError, ValueError):
    """An argument lies outside the domain of an operation."""


class OrderWindowError(DomainError):
    """The fractional order lies outside the admissible window."""


class AccuracyDomainError(DomainError):
    """A series cannot be summed to the requested accuracy."""


class SeriesOverflowError(DomainError):
    """A series value exceeds the double precision range."""


class MeshError(DomainError):
    """A sampled function does not fit the discretisation scheme."""


class TailBoundError(DomainError):
    """A quadrature truncation bound is too large to be trusted."""


class UnsupportedOperatorError(FracOpcalcError, TypeError):
    """An operator has no exact action on the given function."""
