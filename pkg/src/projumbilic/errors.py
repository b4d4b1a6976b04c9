"""Exception hierarchy shared by all modules."""


class ProjUmbilicError(Exception):
    """Base class for every error raised by this package."""


class ParseError(ProjUmbilicError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class BranchError(ProjUmbilicError, ValueError):
    """A log/powr argument was not a positive real number."""


class NotOnSurface(ProjUmbilicError):
    pass


class LeviDegenerate(ProjUmbilicError):
    """The bordered Levi determinant vanishes or has the wrong sign."""


class AtInfinity(ProjUmbilicError):
    pass


class SingularMatrix(ProjUmbilicError):
    pass


class NoCrossing(ProjUmbilicError):
    pass


class CircularityError(ProjUmbilicError):
    pass


class ZeroOnContour(ProjUmbilicError):
    pass


class IdenticallyZero(ZeroOnContour):
    """The function is numerically zero on the whole contour."""


class NonConvergent(ProjUmbilicError):
    pass


class AxisUmbilic(ProjUmbilicError):
    pass


class BoundaryZero(ProjUmbilicError):
    pass


class Degenerate(ProjUmbilicError):
    pass


class AllDegenerate(ProjUmbilicError):
    pass


class UmbilicPoint(ProjUmbilicError):
    pass


class NotCConvex(ProjUmbilicError):
    pass


class UnknownFixture(ProjUmbilicError, KeyError):
    pass


class BadParams(ProjUmbilicError, ValueError):
    pass
