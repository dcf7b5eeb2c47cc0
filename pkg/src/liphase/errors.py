"""Exception hierarchy shared by all modules."""


class LiphaseError(Exception):
    pass


class UsageError(LiphaseError):
    """Malformed input text or arguments."""


class NotSymmetric(LiphaseError):
    pass


class NotContained(LiphaseError):
    pass


class DegenerateInput(LiphaseError):
    pass


class NotSymplectic(LiphaseError):
    pass


class NearSingular(LiphaseError):
    pass


class NonVanishingViolated(LiphaseError):
    pass


class PrecisionExhausted(LiphaseError):
    pass


class Unsupported(LiphaseError):
    pass


class OutOfU0(LiphaseError):
    pass


class IntegralityViolated(LiphaseError):
    pass


class SignUndetermined(LiphaseError):
    pass


class NotIsotropic(LiphaseError):
    pass


class RankDeficient(LiphaseError):
    pass


class NotTransversal(LiphaseError):
    pass


class SampleRankDeficient(LiphaseError):
    pass


class ActionUndefined(LiphaseError):
    pass


class RealityViolated(LiphaseError):
    pass


class UnsupportedLift(LiphaseError):
    pass


class BranchMismatch(LiphaseError):
    """A stored branch value disagrees with the principal argument it lifts."""
