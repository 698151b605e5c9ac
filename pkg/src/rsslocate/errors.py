class RssLocateError(Exception):
    """Base class for errors raised by this package."""


class DomainError(RssLocateError, ValueError):
    """An input lies outside the domain of the path-loss model."""


class InvalidStartError(RssLocateError, ValueError):
    """A start position lies outside the grid map."""


class InsufficientDataError(RssLocateError):
    """Fewer measurements than unknowns in the least-squares system."""


class RankDeficientError(RssLocateError):
    """The least-squares system has numerical rank below 3.

    Usually means the receiver positions are collinear.
    """

    def __init__(self, message, rank=None):
        super().__init__(message)
        self.rank = rank


class AllDegenerateError(RssLocateError):
    """Every candidate exponent in the grid produced a degenerate system."""
