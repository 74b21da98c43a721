"""Exception types raised by the solver."""


class ConfigError(ValueError):
    """Invalid solver configuration or model parameters."""


class DomainError(ValueError):
    """Input outside the domain of an operation (e.g. r <= 0)."""


class BracketError(RuntimeError):
    """No Hit/Miss transition could be bracketed."""


class IndeterminateError(RuntimeError):
    """A bracket endpoint produced a shot that is neither Hit nor Miss."""

    def __init__(self, delta, kind):
        super().__init__(f"indeterminate shot at delta={delta!r} ({kind})")
        self.delta = delta
        self.kind = kind


class NoConvergence(RuntimeError):
    """Bisection finished but the terminal tangent is not horizontal enough."""

    def __init__(self, achieved, angle_tol, delta):
        super().__init__(
            f"|x'(s1)+1| = {achieved:.3e} exceeds angle_tol = {angle_tol:.3e} at delta={delta!r}"
        )
        self.achieved = achieved
        self.angle_tol = angle_tol
        self.delta = delta


class JointError(ValueError):
    """Reflecting the half profile would create a corner on the r-axis."""


class SimplicityError(ValueError):
    """Closed profile intersects itself."""
