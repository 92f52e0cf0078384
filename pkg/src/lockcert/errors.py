"""Exception hierarchy shared by all lockcert modules."""


class LockError(ValueError):
    """Base class for every error raised by lockcert."""


# lock_core
class RadicandNegative(LockError):
    pass


class DegenerateAngle(LockError):
    pass


class SampleOutOfBounds(LockError):
    pass


class NegativeTrace(LockError):
    """Incoming k-trace constant ``a`` is negative (only ``a >= 0`` is supported)."""


# chain_engine
class EmptySamples(LockError):
    pass


class OverrideInconsistent(LockError):
    pass


class InvariantBreach(LockError):
    pass


class HypothesesNotChecked(LockError):
    pass


class StructuralMismatch(LockError):
    pass


class InterfaceError(LockError):
    """A lock_core error raised while processing a particular interface."""

    def __init__(self, index: int, cause: LockError):
        super().__init__(f"interface {index}: {cause}")
        self.index = index
        self.cause = cause


# radial_geometry
class ProfileError(LockError):
    pass


class OutOfDomain(LockError):
    pass


class DimensionUnsupported(LockError):
    pass


class NotAsymptoticallyFlat(LockError):
    pass


class CurvatureHypothesisViolated(LockError):
    pass


class NonpositiveMeanCurvature(LockError):
    pass


# cli_io
class ParseError(LockError):
    pass


class ValidationError(LockError):
    pass


class InvalidGrid(LockError):
    pass
