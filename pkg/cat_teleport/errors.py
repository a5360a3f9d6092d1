"""Exception hierarchy shared by the engines, the protocols and the CLI."""


class CatTeleportError(Exception):
    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message


class ValidationFailed(CatTeleportError):
    """The request itself is inconsistent; maps to CLI exit status 2."""


class NumericalFailure(CatTeleportError):
    """A well-formed request hit a numerical wall; maps to CLI exit status 3."""


class ReportWriteFailed(CatTeleportError):
    """The report could not be written; maps to CLI exit status 4."""


class MismatchedModeCount(ValidationFailed):
    pass


class EmptyState(ValidationFailed):
    pass


class InvalidLabel(ValidationFailed):
    pass


class BadModeIndex(ValidationFailed):
    pass


class SameMode(ValidationFailed):
    pass


class CutoffMismatch(ValidationFailed):
    pass


class AlphaMismatch(ValidationFailed):
    pass


class ParityMismatch(ValidationFailed):
    pass


class EngineLimitExceeded(ValidationFailed):
    pass


class InvalidTolerance(ValidationFailed):
    pass


class InvalidGrid(ValidationFailed):
    pass


class UnsupportedFormat(ValidationFailed):
    pass


class NearSingularState(NumericalFailure):
    pass


class NonConvergence(NumericalFailure):
    pass


class NotNormalized(NumericalFailure):
    pass


class CutoffTooSmall(NumericalFailure):
    pass


class ZeroState(NumericalFailure):
    pass


class ModeNotSeparated(NumericalFailure):
    pass


class InvalidDensityMatrix(NumericalFailure):
    pass


class EngineDisagreement(NumericalFailure):
    pass
