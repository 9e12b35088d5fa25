"""Exception types shared across the package."""


class BicpbError(Exception):
    """Base class for all package errors."""


class SingularElement(BicpbError, ArithmeticError):
    """Raised when inverting a bicomplex number with no inverse."""

    def __init__(self, modulus: float):
        self.modulus = modulus
        super().__init__(f"bicomplex element is singular (|phi1^2 + phi2^2| = {modulus:.3e})")


class MalformedTable(BicpbError, ValueError):
    """A distance table is not square, not symmetric, or references unknown points."""


class AxiomViolation(BicpbError, ValueError):
    """A precondition on the metric axioms does not hold; carries the offending report."""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class NonPositiveCone(BicpbError, ValueError):
    """A distance value lies outside the nonnegative cone 0 <= value."""


class InvalidParams(BicpbError, ValueError):
    """Contraction coefficients outside their admissible range."""


class MissingOrder(BicpbError, ValueError):
    """An operation needs a partial order on the points but none was given."""


class NonFiniteIterate(BicpbError, ArithmeticError):
    """An iteration produced NaN or infinity."""


class NotFixed(BicpbError, ValueError):
    """A candidate point is not a common fixed point."""

    def __init__(self, message: str, residual_u: float, residual_v: float, self_gap: float):
        self.residual_u = residual_u
        self.residual_v = residual_v
        self.self_gap = self_gap
        super().__init__(message)


class Diverged(BicpbError, ArithmeticError):
    """Step distances kept increasing for the configured window."""

    def __init__(self, message: str, trace=None):
        self.trace = trace
        super().__init__(message)


class BadInterval(BicpbError, ValueError):
    pass


class OddSimpson(BicpbError, ValueError):
    pass


class NonFiniteKernel(BicpbError, ArithmeticError):
    pass


class ShapeMismatch(BicpbError, ValueError):
    pass


class UnknownFamily(BicpbError, KeyError):
    """Kernel or free-term family name not present in the registry."""
