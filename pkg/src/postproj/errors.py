"""Exception types shared across the package."""


class InfeasibleError(RuntimeError):
    """The feasible region of a constrained problem is empty."""


class ConvergenceError(RuntimeError):
    """An iterative routine exhausted its budget or failed a residual check."""


class NonUniqueProjectionError(ValueError):
    """The requested projection has more than one nearest point."""


class DegenerateUpdateError(ValueError):
    """A posterior update collapsed (zero resultant, vanishing mass, ...)."""
