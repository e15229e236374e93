"""Exception hierarchy.

Input errors map to CLI exit code 2, mathematical precondition failures to
exit code 3.
"""


class CoamoebaLabError(Exception):
    exit_code = 1


class InputError(CoamoebaLabError):
    exit_code = 2


class ParseError(InputError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class DimensionMismatchError(InputError):
    pass


class ZeroPolynomialError(InputError):
    pass


class PreconditionError(CoamoebaLabError):
    exit_code = 3


class NonTransverseError(PreconditionError):
    pass


class NonBinomialError(PreconditionError):
    pass


class UnsolvableError(PreconditionError):
    """A hypersurface with no distinguished variable, or a rank-deficient line."""


class DegeneracyError(PreconditionError):
    pass


class SnappingError(PreconditionError):
    pass


class EmptyComplementError(PreconditionError):
    pass
