"""Exception types shared across the package."""

__all__ = [
    "QuacError",
    "ParameterError",
    "InputError",
    "ConstructionError",
    "IntegrationError",
    "DisconnectedGraphError",
]


class QuacError(Exception):
    """Base class for package-specific failures."""


class ParameterError(QuacError, ValueError):
    """A configuration value is outside its legal range."""


class InputError(QuacError, ValueError):
    """A data structure handed to an operation is malformed."""


class ConstructionError(QuacError, ValueError):
    """A derived object (graph, Hamiltonian path, mark set) cannot be built."""


class IntegrationError(QuacError, RuntimeError):
    """Numerical evolution left its validity envelope (norm drift, no convergence)."""


class DisconnectedGraphError(QuacError, RuntimeError):
    """An operation that requires a connected graph was given a disconnected one."""
