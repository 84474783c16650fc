"""Exception types raised by the thermal model."""


class ThermalModelError(Exception):
    """Base class for all model errors."""


class DomainError(ThermalModelError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class NumericError(ThermalModelError, ArithmeticError):
    """A numerical step produced a singular or non-finite result."""


class DegenerateBC(NumericError):
    """Robin basis coefficients cannot be formed for a degree index."""

    def __init__(self, n, det):
        super().__init__(f"Robin basis determinant vanishes for n={n} (DET={det:.3e})")
        self.n = n
        self.det = det


class DegenerateLifting(NumericError):
    """The 2x2 edge systems of the boundary lifting are singular."""
