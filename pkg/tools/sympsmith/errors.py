"""Error taxonomy shared by every sympsmith module."""


class SympSmithError(Exception):
    """Base class for all sympsmith errors."""


class InvalidDimensionError(SympSmithError, ValueError):
    """A matrix or form has a shape the operation cannot accept."""


class InvalidArgumentError(SympSmithError, ValueError):
    """An argument is outside the documented range."""


class PreconditionViolation(SympSmithError, ValueError):
    """An input does not satisfy the mathematical precondition of an operation."""


class InvalidGeneratorError(SympSmithError, ValueError):
    """Parameters do not define an integral symplectic generator."""


class NotInMpError(SympSmithError, ValueError):
    """The integral matrix is not proportional to a symplectic matrix.

    Attributes:
        reason (str): why the matrix was rejected
    """

    def __init__(self, reason):
        super().__init__(f"matrix is not in Mp(n, Z): {reason}")
        self.reason = reason


class NotSymplecticError(SympSmithError, ValueError):
    """The rational matrix is not symplectic.

    Attributes:
        location (tuple or None): (row, col) of the first nonzero entry of
            the symplectic defect, 0-based; None for shape problems
    """

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class InternalError(SympSmithError, RuntimeError):
    """An internal consistency check failed. Always a bug."""


class MatrixFileError(SympSmithError, ValueError):
    """A matrix or decomposition file could not be parsed.

    Attributes:
        line (int or None): 1-based line number of the problem, if known
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
