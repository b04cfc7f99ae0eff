"""Exception hierarchy shared by all modules.

Each class maps to a CLI exit code (see :mod:`scaledlattice.cli`).
"""


class ScaledLatticeError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class DomainError(ScaledLatticeError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    exit_code = 2


class ResourceError(ScaledLatticeError):
    """A requested computation exceeds a configured size budget."""

    exit_code = 3


class ComputationError(ScaledLatticeError, ArithmeticError):
    """A numerical result is unusable (non-finite value, negative radicand...)."""

    exit_code = 4


class CapabilityError(DomainError):
    """An integrand oracle cannot supply the requested mixed partial derivative."""
