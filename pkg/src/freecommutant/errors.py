"""Exception types shared across the package."""


class FreeCommutantError(Exception):
    """Base class for all errors raised by this package."""


class SizeLimitError(FreeCommutantError, ValueError):
    """A requested enumeration or expansion exceeds a configured cap."""


class GroundSetError(FreeCommutantError, ValueError):
    """Partitions or sequences over mismatched ground sets / orders."""


class KindError(FreeCommutantError, ValueError):
    """A partition of the wrong kind (crossing, non-interval, ...)."""


class DomainError(FreeCommutantError, ValueError):
    """Arguments outside an operation's domain."""


class TruncationError(FreeCommutantError, ValueError):
    """A sequence does not extend to the order a computation needs."""


class EngineConsistencyError(FreeCommutantError, RuntimeError):
    """An identity the engine guarantees internally failed; signals a bug."""


class SpecSyntaxError(FreeCommutantError, ValueError):
    """A distribution spec string failed to parse.

    ``position`` is the 0-based offset at which parsing gave up.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position
