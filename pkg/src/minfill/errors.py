"""Exception hierarchy shared by all modules."""


class MinfillError(ValueError):
    """Base class for domain errors raised by this package."""


class DomainError(MinfillError):
    """An argument lies outside the domain of an operation."""


class NewickParseError(MinfillError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class NotRealizedError(MinfillError):
    """A distance matrix is not realized by a topology with nonnegative weights."""

    def __init__(self, message, edge=None, pair=None):
        super().__init__(message)
        self.edge = edge
        self.pair = pair


class NotAdditiveError(MinfillError):
    """A distance matrix violates the four-point condition."""

    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness
