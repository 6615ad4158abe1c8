"""Exception hierarchy shared by all kernel modules.

KernelError subclasses mark user-level errors (bad inputs, unsupported
domains); ConsistencyError marks a failed internal cross-check between two
independent computation routes and must never fire on valid inputs.  The CLI
maps KernelError to exit code 2 and ConsistencyError to exit code 3.
"""


class KernelError(Exception):
    """Base class for all user-facing kernel errors."""


class InvalidUnitError(KernelError):
    """Argument required to be a unit is divisible by p."""


class PrecisionError(KernelError):
    """Operation not representable in fixed-modulus arithmetic (1/p needed)."""


class CompositionError(KernelError):
    """Series composition g(f) with f(0) != 0."""


class ReversionError(KernelError):
    """Series reversion with non-invertible linear coefficient."""


class LevelError(KernelError):
    """Cyclotomic or torsion level out of range."""


class ConstructionError(KernelError):
    """Frobenius polynomial fails the Lubin-Tate congruences."""


class StabilityError(KernelError):
    """Operation defined only for stable functions got a non-stable input."""


class AdmissibilityError(KernelError):
    """Admissibility precondition violated (depth or support)."""


class ConductorError(KernelError):
    """Conductor outside the supported or declared range."""


class PoleError(KernelError):
    """L-factor pole: unramified character with value 1 at the uniformizer."""


class DivergenceError(KernelError):
    """Zeta tail with no L-cancellation; no regularization is defined."""


class MissingDataError(KernelError):
    """Supercuspidal data (L or epsilon table) required but not supplied."""


class ModelError(KernelError):
    """Operation requires a formal-group model this object does not have."""


class CompatibilityError(KernelError):
    """Central-character compatibility between representation and character fails."""


class SchemaError(KernelError):
    """CLI input does not match the declared JSON schema."""


class ConsistencyError(Exception):
    """Two independent computation routes disagree; internal invariant broken."""
