"""Exception types shared across the package."""


class TailBiasError(Exception):
    """Base class for all errors raised by tailbias."""


class DomainError(TailBiasError, ValueError):
    """An argument lies outside the domain of the operation."""


class InfiniteMomentError(TailBiasError, ArithmeticError):
    """The requested moment or conditional mean does not exist (is infinite).

    Kept distinct from `DomainError` so callers can tell "you asked for
    something that diverges" apart from "your parameters are malformed".
    """


class NumericalError(TailBiasError, ArithmeticError):
    """A numerical routine produced a non-finite or unusable value."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge.

    The best estimate reached before giving up is kept in ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
