"""Exception hierarchy.

Domain failures (bad input, a function outside the tight span, ...) derive
from :class:`TrimspanError`.  :class:`InvariantError` is reserved for states
that the theory rules out; seeing one means a bug, not bad input.
"""


class TrimspanError(ValueError):
    pass


class InvariantError(AssertionError):
    """A property that must hold for every valid finite input was violated."""


class EmptySpace(TrimspanError):
    pass


class UnknownPoint(TrimspanError, KeyError):
    def __init__(self, label):
        super().__init__(f"unknown point {label!r}")
        self.label = label

    def __str__(self):
        return self.args[0]


class AxiomError(TrimspanError):
    """Base for pseudometric axiom failures; ``points`` names the witnesses."""

    def __init__(self, message, points):
        super().__init__(message)
        self.points = tuple(points)


class AsymmetryError(AxiomError):
    pass


class NegativeDistanceError(AxiomError):
    pass


class NonzeroDiagonalError(AxiomError):
    pass


class TriangleViolation(AxiomError):
    pass


class DriftTooLarge(TrimspanError):
    def __init__(self, label, value, bound):
        super().__init__(f"drift {value} at {label!r} exceeds underline_d = {bound}")
        self.label = label


class NeverMeets(TrimspanError):
    def __init__(self, x, y):
        super().__init__(f"trajectories of {x!r} and {y!r} never meet")
        self.points = (x, y)


class UnexpectedGlue(InvariantError):
    pass


class BaseMismatch(TrimspanError):
    pass


class StarViolation(TrimspanError):
    def __init__(self, x, y):
        super().__init__(f"f({x}) + f({y}) < d({x},{y})")
        self.points = (x, y)


class NotMember(TrimspanError):
    pass


class InternalContradiction(InvariantError):
    pass


class NotATree(TrimspanError):
    pass


class TooFewLeaves(TrimspanError):
    pass


class NoMeeting(TrimspanError):
    def __init__(self, x, y):
        super().__init__(f"chain trajectories of {x!r} and {y!r} never meet")
        self.points = (x, y)


class ParseError(TrimspanError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class NonpositiveLength(TrimspanError):
    pass
