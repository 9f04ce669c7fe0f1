"""Exception hierarchy shared by all modules."""


class OrbifoldError(Exception):
    pass


class ZeroInput(OrbifoldError, ValueError):
    pass


class NotPrime(OrbifoldError, ValueError):
    pass


class NotMFull(OrbifoldError, ValueError):
    pass


class InvariantViolation(OrbifoldError, ValueError):
    pass


class IntegerOverflow(OrbifoldError, OverflowError):
    """An integer left the supported 64-bit input range."""


class ModulusTooLarge(OrbifoldError, ValueError):
    pass


class NotStabilized(OrbifoldError, RuntimeError):
    def __init__(self, message, p=None, value=None):
        super().__init__(message)
        self.p = p
        self.value = value


class TailDominates(OrbifoldError, RuntimeError):
    pass


class DeltaOutOfRange(OrbifoldError, ValueError):
    pass


class TooLarge(OrbifoldError, RuntimeError):
    """Refused: the estimated work exceeds the enumeration guard."""


class TooLargeToEnumerate(TooLarge):
    pass


class DegenerateInput(OrbifoldError, ValueError):
    pass


class ConfigInvalid(OrbifoldError, ValueError):
    pass
