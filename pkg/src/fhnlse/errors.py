"""Exception types shared across the package."""


class NumericalAbort(RuntimeError):
    """Raised when a solver or integrator encounters non-finite values."""


class NonConvergenceError(RuntimeError):
    """Raised when an experiment requires a converged ground state but the
    solve stopped at its iteration cap or stalled."""
