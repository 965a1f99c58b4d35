"""Exception hierarchy shared across gnepkit."""


class GnepkitError(Exception):
    """Base class for all errors raised by gnepkit."""


class DimensionError(GnepkitError, ValueError):
    pass


class NonEuclideanNormError(GnepkitError):
    """Raised when a projection is requested under a norm other than Euclidean."""


class ExprSyntaxError(GnepkitError, ValueError):
    """Malformed expression text.

    ``offset`` is the UTF-8 byte offset of the offending token.
    """

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class ExprEvalError(GnepkitError, ArithmeticError):
    pass


class NonSmoothError(GnepkitError):
    """Differentiation hit a min/max/abs node."""


class IntervalError(GnepkitError):
    """Expression falls outside the supported interval-arithmetic fragment."""


class EmptySetError(GnepkitError):
    pass


class InfeasibleInstantiationError(EmptySetError):
    """A constraint map evaluated to an empty set.

    ``player`` and ``coordinate`` identify the offending bound when known.
    """

    def __init__(self, message, player=None, coordinate=None):
        super().__init__(message)
        self.player = player
        self.coordinate = coordinate


class UnboundedSetError(GnepkitError):
    pass


class ConvergenceError(GnepkitError):
    """An iterative method ran out of iterations.

    ``residual`` carries the last measured residual.
    """

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class CertificationError(GnepkitError):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class ProblemError(GnepkitError, ValueError):
    """Invalid problem file; ``errors`` is a list of (json_pointer, message)."""

    def __init__(self, errors):
        self.errors = list(errors)
        lines = [f"{ptr or '/'}: {msg}" for ptr, msg in self.errors]
        super().__init__("invalid problem:\n  " + "\n  ".join(lines))
