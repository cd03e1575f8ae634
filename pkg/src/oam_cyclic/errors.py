class InvalidArgumentError(ValueError):
    """Raised for out-of-range parameters, dimension mismatches and bad input."""


class WindowEscapeError(InvalidArgumentError):
    """An OAM shift moved amplitude outside the finite basis window of a matrix."""
