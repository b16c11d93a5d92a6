"""Exception hierarchy shared by all hyptrig modules."""


class HyptrigError(Exception):
    """Base class for every error raised by hyptrig."""


class SingularTransform(HyptrigError, ValueError):
    pass


class NegativelyOriented(HyptrigError, ValueError):
    pass


class DegenerateTriangle(HyptrigError, ValueError):
    pass


class MaxDepthExceeded(HyptrigError, RuntimeError):
    pass


class TailDivergent(HyptrigError, ValueError):
    pass


class PoleAtNonpositiveInteger(HyptrigError, ValueError):
    pass


class OutsideP(HyptrigError, ValueError):
    """Spectral parameter with Re(s) <= -1."""


class BadBoundaryParameter(HyptrigError, ValueError):
    pass


class UnsupportedFunction(HyptrigError, ValueError):
    pass


class EmptyInput(HyptrigError, ValueError):
    pass


class NotInvariant(HyptrigError, ValueError):
    pass
