"""Exception types raised across the package."""


class RBodyError(Exception):
    """Base class for all errors raised by rbody."""


class DegenerateInput(RBodyError, ValueError):
    pass


class NoSuchBall(RBodyError, ValueError):
    pass


class InvalidParameters(RBodyError, ValueError):
    pass


class Unsupported(RBodyError, ValueError):
    pass


class Undefined(RBodyError, ValueError):
    pass


class ResourceLimit(RBodyError, MemoryError):
    pass


class WindowTooSmall(RBodyError, ValueError):
    """The lattice window does not leave the margin a hulloid computation needs."""

    def __init__(self, needed: float, available: float):
        self.needed = needed
        self.available = available
        super().__init__(
            f"window margin {available:.6g} is below the required {needed:.6g}; "
            f"inflate the window by at least 2R + 4h on every side"
        )


class WitnessNotFound(RBodyError, LookupError):
    pass
