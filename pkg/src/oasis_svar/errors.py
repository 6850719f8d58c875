"""Exception hierarchy shared by every module of the package."""


class OasisError(ValueError):
    """Base class for all errors raised by oasis_svar."""


class NotPositiveDefinite(OasisError):
    pass


class NotSymmetric(OasisError):
    pass


class NegativeEigenvalue(OasisError):
    pass


class SingularMatrix(OasisError):
    pass


class NotOrthonormal(OasisError):
    pass


class DimensionMismatch(OasisError):
    pass


class NotInFeasibleSet(OasisError):
    """A′ΣA deviates from the identity by more than the feasibility tolerance."""


class InvalidPermutation(OasisError):
    pass


class NonpositiveWeight(OasisError):
    pass


class RhoOutOfRange(OasisError):
    pass


class InsufficientSample(OasisError):
    pass


class CollinearRegressors(OasisError):
    pass


class SingularSubset(OasisError):
    pass


class FileNotFound(OasisError):
    pass


class UnknownVariable(OasisError):
    pass


class NonPositiveValueUnderLog(OasisError):
    pass


class RaggedRows(OasisError):
    pass


class ConfigError(OasisError):
    pass


class StageError(OasisError):
    """Wraps an error raised inside a pipeline stage of a study run."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")


class RankDeficientInstruments(UserWarning):
    """Instrument cross-correlations lack full column rank; the maximizer is not unique."""


class NonFiniteValue(OasisError):
    pass
