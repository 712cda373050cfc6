"""Exception hierarchy shared across qspec."""


class QSpecError(Exception):
    """Base class for all qspec errors."""


class ConfigError(QSpecError, ValueError):
    """Invalid parameters, plans, or configuration."""


class DomainError(QSpecError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class BoundaryError(QSpecError, IndexError):
    """A window does not fit inside the observed sample."""


class SimulationError(QSpecError, ArithmeticError):
    """A simulated recursion produced non-finite values."""


class ParseError(QSpecError, ValueError):
    """Unparsable input file content."""
