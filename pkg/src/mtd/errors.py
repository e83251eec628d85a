"""Exception and warning taxonomy.

Error classes map onto the CLI exit codes: configuration problems exit
with 2, physics-level failures with 3, numerical failures with 4.
"""


class MtdError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(MtdError):
    """Invalid configuration: bad scene file, bad units, bad parameters."""

    exit_code = 2


class PhysicsError(MtdError):
    """The requested quantity is not defined for the given physical inputs."""

    exit_code = 3


class NumericsError(MtdError):
    """A numerical procedure failed to converge or resolve."""

    exit_code = 4


class ZeroDetuningError(PhysicsError):
    """Laser tuned exactly to resonance; the two-level response diverges."""


class NotATrapError(PhysicsError):
    """The stationary point is not a potential minimum."""


class FlatPotentialError(PhysicsError):
    """The potential has no usable gradient near the seed point."""


class ConvergenceError(NumericsError):
    """Iterative refinement exhausted its budget."""


class GridTooCoarseError(NumericsError):
    """Discretization too coarse for the requested accuracy."""


class NodeBudgetError(ConfigError):
    """A sampling request exceeds the configured grid node budget."""


class ValidityWarning(UserWarning):
    """A result lies outside the validity regime of the underlying model."""


class GeometryWarning(UserWarning):
    """A geometric configuration is ambiguous or ineffective."""


class ResolutionWarning(UserWarning):
    """Discretization may be too coarse to resolve the dynamics."""
