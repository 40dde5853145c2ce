"""Exception types shared across the package.

Every error the library raises on bad input derives from ``HomrepError``,
so callers (and the CLI) can catch one base class.
"""


class HomrepError(ValueError):
    """Base class for all library errors."""


class FormatError(HomrepError):
    """Malformed JSON input or an unknown key."""


# surfaces
class InvalidSurface(HomrepError):
    pass


class EmptyEnds(InvalidSurface):
    pass


class UnsupportedSurface(HomrepError):
    """The requested operation is not defined for this surface type."""


# homology
class InvalidIndex(HomrepError):
    pass


class SurfaceMismatch(HomrepError):
    pass


class ZeroClass(HomrepError):
    pass


class NotSimpleIsotropic(HomrepError):
    pass


class NotSimpleClass(HomrepError):
    pass


class MalformedBasis(HomrepError):
    pass


class SameEnd(HomrepError):
    pass


# filtrations
class InadmissibleL(HomrepError):
    pass


class StarViolated(HomrepError):
    pass


class IncompleteSample(HomrepError):
    pass


class NotNested(HomrepError):
    pass


# automorphisms
class NotUnimodular(HomrepError):
    pass


class PairingNotPreserved(HomrepError):
    pass


class WindowNotClosed(HomrepError):
    pass


class FiltrationNotPreserved(HomrepError):
    pass


class NotPunctures(HomrepError):
    pass


# realization
class FactorizationIncomplete(HomrepError):
    pass


class NotRealizable(HomrepError):
    pass


class DepthTooSmall(HomrepError):
    pass
