"""Exception hierarchy shared by every module of the package."""


class MainProblemError(Exception):
    """Base class for all errors raised by this package."""


class KeplerConvergenceError(MainProblemError, ArithmeticError):
    """Kepler's equation did not converge within the iteration budget."""


class SingularChartError(MainProblemError, ValueError):
    """The requested chart is undefined at the given state."""


class DegeneratePartialsError(MainProblemError, ValueError):
    """A partial derivative is unbounded at the given state (e -> 0)."""


class ResonanceError(MainProblemError):
    """The state is too close to the critical inclination, sin^2 I = 4/5."""

    def __init__(self, divisor: float, guard: float):
        self.divisor = float(divisor)
        self.guard = float(guard)
        super().__init__(
            f"critical-inclination guard tripped: |5 s^2 - 4| = {self.divisor:.6g} < {self.guard:g}"
        )


class InversionError(MainProblemError):
    """Fixed-point inversion of a periodic correction failed to converge."""


class IntegrationError(MainProblemError):
    """The numerical integrator could not complete the requested arc."""


class AccuracyError(MainProblemError):
    """A reference trajectory violated its conserved-quantity budget."""

    def __init__(self, quantity: str, drift: float, limit: float):
        self.quantity = quantity
        self.drift = float(drift)
        self.limit = float(limit)
        super().__init__(f"{quantity} drift {self.drift:.3e} exceeds {self.limit:.1e}")


class UsageError(MainProblemError, ValueError):
    """Inconsistent arguments, e.g. mismatched time grids."""
