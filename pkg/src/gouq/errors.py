"""Exception hierarchy shared by all modules."""


class GouqError(ValueError):
    """Base class for invalid inputs and inapplicable operations."""


class InvalidC(GouqError):
    pass


class InvalidRate(GouqError):
    pass


class DegenerateModel(GouqError):
    pass


class NotInfinitelyDivisible(GouqError):
    pass


class ZeroAtOrigin(GouqError):
    pass


class PZero(GouqError):
    pass


class DegenerateAB(GouqError):
    pass


class NotApplicable(GouqError):
    pass


class TruncationTooSmall(GouqError):
    pass


class NotPisot(GouqError):
    pass


class UncertifiedRoots(GouqError):
    pass


class QZero(GouqError):
    pass
