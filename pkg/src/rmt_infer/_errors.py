"""Exception hierarchy shared by every module.

Each class carries a short ``code`` used by the command-line front end to
emit one machine-parsable error line.
"""


class RMTError(Exception):
    code = "error"


class DomainError(RMTError, ValueError):
    """An argument lies outside the domain of the operation."""

    code = "domain_error"


class NumericalError(RMTError, ArithmeticError):
    """A numerical procedure failed (no convergence, breakdown, ...)."""

    code = "numerical_error"


class NotPositiveDefiniteError(NumericalError):
    code = "not_positive_definite"


class IntegrationError(NumericalError):
    code = "integration_error"


class BuildError(NumericalError):
    code = "build_error"
