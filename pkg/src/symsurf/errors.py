"""Exception types shared across the package."""


class SymsurfError(Exception):
    """Base class for all package-specific errors."""


class NotLoxodromic(SymsurfError):
    """Matrix fails the purely-loxodromic gate (distinct positive real spectrum)."""


class NotParabolic(SymsurfError):
    """Cocycle is not a coboundary on a designated peripheral subgroup."""


class NotClosedSurface(SymsurfError):
    """Operation requires a closed-surface presentation."""


class IllConditioned(SymsurfError):
    """Numerical rank decision has an unacceptably small singular-value gap."""


class InvariantViolation(SymsurfError):
    """A required invariance gate (e.g. Ad-invariance of a bending direction) fails."""


class DegenerateConfiguration(SymsurfError):
    """Flag tuple fails the wedge-determinant genericity gate."""


class SingularOmega(SymsurfError):
    """The sampled symplectic matrix is numerically singular."""


class LeftDomain(SymsurfError):
    """A flow trajectory left the chart domain."""


class ShootingDiverged(SymsurfError):
    """Newton shooting for flow times failed to converge."""


class SchemaError(SymsurfError):
    """JSON input does not match the expected schema."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(message if field is None else f"{message} (field: {field})")
