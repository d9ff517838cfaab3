"""Typed exceptions raised across the package."""


class GeoCurrentsError(Exception):
    """Base class for every error raised by geocurrents."""


class CoincidentPoints(GeoCurrentsError):
    pass


class BadCyclicOrder(GeoCurrentsError):
    pass


class NotHyperbolic(GeoCurrentsError):
    pass


class TrivialWord(GeoCurrentsError):
    pass


class BudgetExceeded(GeoCurrentsError):
    pass


class UnsupportedGenus(GeoCurrentsError):
    pass


class InvalidCover(GeoCurrentsError):
    pass


class UnstableEnumeration(GeoCurrentsError):
    pass


class SignedNotAllowed(GeoCurrentsError):
    pass


class QuadratureFailure(GeoCurrentsError):
    pass


class DegenerateSpectrum(GeoCurrentsError):
    pass


class InsufficientPairs(GeoCurrentsError):
    pass


class NoPositiveEps(GeoCurrentsError):
    pass


class NoWitnessInBudget(GeoCurrentsError):
    pass


class NoCrossingAtom(GeoCurrentsError):
    pass


class PreconditionError(GeoCurrentsError):
    pass


class DomainError(GeoCurrentsError, ValueError):
    pass


class ConvergenceFailure(GeoCurrentsError):
    pass


class WindowTooSmall(GeoCurrentsError):
    pass


class DegenerateCurve(GeoCurrentsError):
    pass


class ConfigError(GeoCurrentsError):
    pass
