"""Exception hierarchy shared by the library and the command line."""


class MtvqError(Exception):
    """Base class for all package errors."""


class ValidationError(MtvqError, ValueError):
    """Input violates a structural invariant (bad index, ratio, length...)."""


class InvalidEdgeError(ValidationError):
    pass


class SchemaError(ValidationError):
    """A problem file is well-formed JSON but does not follow the schema."""


class ParseError(MtvqError, ValueError):
    """A problem file or bitstring could not be parsed at all."""


class EnumerationBoundError(MtvqError):
    """Requested exhaustive enumeration exceeds the configured qubit bound."""


class SimulationError(MtvqError, RuntimeError):
    """Raised for simulator bounds and non-finite optimizer objectives."""
