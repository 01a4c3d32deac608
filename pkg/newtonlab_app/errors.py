class NewtonLabError(RuntimeError):
    pass


# ---- complex rational maps

class IndeterminatePointError(NewtonLabError):
    """Both homogeneous coordinates vanish: the point is a hole."""


class HoleMatchingError(NewtonLabError):
    """A near-common root of F_a and F_b straddles the matching tolerance."""


class RootSolverError(NewtonLabError):
    def __init__(self, message: str, partial_roots=None):
        super().__init__(message)
        self.partial_roots = list(partial_roots or [])


class SolverCapError(NewtonLabError):
    pass


class NotFixedError(NewtonLabError):
    pass


class RepeatedRootsError(NewtonLabError):
    pass


class IndexQuadratureError(NewtonLabError):
    pass


class ParseError(NewtonLabError, ValueError):
    pass


# ---- Puiseux series

class SeriesError(NewtonLabError):
    pass


class SeriesDivisionByZero(SeriesError, ZeroDivisionError):
    pass


class TruncationError(SeriesError):
    """Not enough terms survive truncation; raise NEWTONLAB_PUISEUX_ORDER."""


class NotIntegralError(SeriesError):
    pass


# ---- analysis

class DegenerationError(NewtonLabError):
    pass


class VerificationError(NewtonLabError):
    def __init__(self, message: str, quantity=None):
        super().__init__(message)
        self.quantity = quantity


class BracketingError(NewtonLabError):
    pass
