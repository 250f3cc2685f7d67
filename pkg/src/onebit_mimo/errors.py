"""Exception types raised by the library."""


class InvalidParameterError(ValueError):
    """A parameter is outside its documented domain."""


class InvalidInputError(ValueError):
    """Input data (e.g. a received sample) is not usable."""


class DegenerateChannelError(ValueError):
    """The channel vector is identically zero."""


class InfeasibleError(ValueError):
    """The problem has no solution for the given dimensions (e.g. K > M for ZF)."""


class SingularChannelError(ValueError):
    """The Gram matrix H H^H is too ill-conditioned to invert."""


class ComplexityCapError(ValueError):
    """An exhaustive search was requested beyond its size cap."""
