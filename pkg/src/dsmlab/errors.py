"""Exception hierarchy shared by the simulation modules and the CLI."""


class DSMError(Exception):
    """Base class for all errors raised by dsmlab."""


class ParameterError(DSMError, ValueError):
    """A physical or numerical parameter lies outside its valid domain."""


class SingularParameterError(ParameterError):
    """A parameter value makes a derived quantity diverge (e.g. zero probe detuning)."""


class GridMismatchError(DSMError, ValueError):
    """Two fields or modes that must share a grid do not."""


class NumericError(DSMError, ArithmeticError):
    """A numerical routine failed (non-convergence, singular solve, ...)."""


class DivergenceError(NumericError):
    """The time integration produced non-finite values."""

    def __init__(self, message, t=None, step=None):
        super().__init__(message)
        self.t = t
        self.step = step


class WeakProbeError(DSMError, ValueError):
    """The atomic coherence left the weak-probe (linear response) regime."""


class ConfigError(DSMError, ValueError):
    """Scenario configuration is malformed or inconsistent."""


class FidelityUndefinedError(DSMError, ValueError):
    """Fidelity requested against a field with zero norm."""
