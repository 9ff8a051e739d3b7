"""Exception hierarchy shared by all adv2e modules."""


class Adv2eError(Exception):
    """Base class for every error raised by adv2e."""


class InvalidConfig(Adv2eError, ValueError):
    """Raised when a :class:`~adv2e.types.SimConfig` violates its constraints.

    ``violations`` holds one message per broken constraint.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class InvalidFactor(Adv2eError, ValueError):
    pass


# ingestion

class MissingFile(Adv2eError, FileNotFoundError):
    pass


class GeometryMismatch(Adv2eError, ValueError):
    pass


class NonMonotonicTimestamps(Adv2eError, ValueError):
    pass


class ManifestError(Adv2eError, ValueError):
    """Malformed manifest line or too few frames."""


# metrics / rendering

class InvalidWindow(Adv2eError, ValueError):
    pass


class DimensionMismatch(Adv2eError, ValueError):
    pass


# event io

class ParseError(Adv2eError, ValueError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class BoundsError(Adv2eError, ValueError):
    pass


class BadMagic(Adv2eError, ValueError):
    pass


class TruncatedFile(Adv2eError, ValueError):
    pass
