"""Exception types shared across the package."""


class AtlasError(Exception):
    """Base class for every error raised by atlas."""


class DivisionByZero(AtlasError, ZeroDivisionError):
    pass


class PrecisionExhausted(AtlasError):
    """The working precision was too small to see a nonzero coefficient."""


class BackendMismatch(AtlasError):
    pass


class NonZeroDegree(AtlasError):
    pass


class UnsupportedSupport(AtlasError):
    """A divisor or function involves places the library cannot handle."""


class NoSuchFunction(AtlasError):
    pass


class NotSplittable(AtlasError):
    pass


class EvaluationPole(AtlasError):
    pass


class SingularFiber(AtlasError):
    pass


class NotAJump(AtlasError):
    pass


class OutOfFamily(AtlasError):
    """Input lies outside the families handled by the normalizer."""


class SideConditionViolated(AtlasError):
    pass


class InvalidChoice(AtlasError):
    pass


class OutOfUniverse(AtlasError):
    """Descriptor not covered by the classification."""
