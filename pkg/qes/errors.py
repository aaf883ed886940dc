class QESError(Exception):
    """Base class for every error raised on purpose by the qes package."""


class InvalidInputError(QESError, ValueError):
    pass


class DependenceConditionError(QESError):
    """The spec does not satisfy the algebraic dependence condition the caller needs."""


class CoincidentPolesError(QESError, ValueError):
    pass


class ConfigFileError(QESError):
    pass


EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2
