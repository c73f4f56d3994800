"""Exception hierarchy shared by all quasibohm modules."""


class QuasibohmError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(QuasibohmError, ValueError):
    """A caller-supplied parameter violates a precondition."""


class DomainError(QuasibohmError, ValueError):
    """A position lies outside the spatial domain of the basis."""


class CapabilityError(QuasibohmError):
    """A request exceeds the supported range of a method (e.g. too many states)."""


class NumericError(QuasibohmError):
    """A numerical procedure failed to converge or meet its tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NodeProximityError(QuasibohmError):
    """The density fell below the node threshold; the velocity field is singular there."""

    def __init__(self, x, t, density):
        super().__init__(
            f"wavefunction node too close at x={x!r}, t={t!r} (density={density!r})"
        )
        self.x = x
        self.t = t
        self.density = density


class TrajectorySingularityError(NumericError):
    """A trajectory ran into a node that step halving could not avoid."""
