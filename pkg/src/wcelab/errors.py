"""Exception types shared across the package."""


class WceLabError(Exception):
    """Base class for all package-specific errors."""


class EmptySpaceError(WceLabError):
    """A measure space was built with no points."""


class NonpositiveWeightError(WceLabError):
    """A point mass is zero, negative, or not finite."""


class NotAPartitionError(WceLabError):
    """Blocks overlap, leave a gap, or contain an empty block."""


class SpaceMismatchError(WceLabError):
    """Two objects built over different spaces were combined."""


class NotSelfAdjointError(WceLabError):
    """A Hermitian-only routine received an operator that is not
    self-adjoint in the weighted inner product."""


class NotPositiveError(WceLabError):
    """A positive-only routine received an operator with genuinely
    negative spectrum."""


class NotMeasurableError(WceLabError):
    """A function required to be constant on partition blocks is not."""


class NotNormalError(WceLabError):
    """A normal-only routine received a non-normal operator."""


class NotFiberMeasurableError(WceLabError):
    """A symbol is not constant on the fibers of a point map."""


class ConfigInvalidError(WceLabError):
    """Generator configuration out of range."""


class ParseError(WceLabError):
    """Malformed instance document; the message names the offending
    field or blocks."""
