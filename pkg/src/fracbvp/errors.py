"""Exception types shared across the package."""


class FracbvpError(Exception):
    """Base class for all library errors."""


class InvalidArgument(FracbvpError, ValueError):
    """An argument violates an operation's precondition."""


class PoleError(FracbvpError, ArithmeticError):
    """Gamma evaluated at zero or a negative integer."""


class UndefinedValue(FracbvpError, ArithmeticError):
    """A generalized falling factorial with no finite value (infinite or 0/0)."""


class EmptyWindow(FracbvpError):
    """No grid point falls inside the requested quarter window."""


class DegenerateColumn(FracbvpError):
    """A Green's-matrix column is too small (or a derived ratio degenerate) to divide by."""


class SingularSystem(FracbvpError):
    """The dense boundary-value system is numerically singular."""


class ResonantFunctional(FracbvpError):
    """The boundary functional satisfies phi(alpha) = 1, so the linear coupling cannot be resolved."""


class SamplingFailure(FracbvpError):
    """Rejection sampling could not produce a cone element."""


class ExpressionError(FracbvpError):
    """Base class for expression parsing/evaluation errors."""


class ExprSyntaxError(ExpressionError):
    """Malformed expression text; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifier(ExprSyntaxError):
    """An identifier that is neither the free variable, a constant, nor a known function."""


class ArityError(ExprSyntaxError):
    """A function call with the wrong number of arguments."""


class EvalPole(ExpressionError):
    """Evaluation hit a pole, a domain error, or a non-finite result."""

    def __init__(self, message: str, subexpr: str = ""):
        detail = f"{message}: {subexpr}" if subexpr else message
        super().__init__(detail)
        self.subexpr = subexpr
