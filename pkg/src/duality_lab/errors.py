"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class AccuracyError(ArithmeticError):
    """A numerical routine could not reach its accuracy target.

    Carries the achieved and requested tolerances so callers can decide
    whether to retry with a finer discretization.
    """

    def __init__(self, message, achieved=None, target=None):
        super().__init__(message)
        self.achieved = achieved
        self.target = target


class KernelError(ValueError):
    """A transition kernel produced an invalid value (e.g. significantly negative)."""


class DegenerateDensityError(ValueError):
    """A density handed to a sampler has no usable mass."""


class ParameterError(ValueError):
    """A structurally invalid parameter (bad ordering, unsupported tag, ...)."""


class AdmissibilityError(ValueError):
    """An operator chain violates the admissibility bookkeeping of its pair.

    Raised for pairs whose multiplier has unbounded negative real part when
    the requested exponents would push intermediate functions outside the
    integrability budget of the discretization.
    """


class CaseDefinitionError(ValueError):
    """A duality case's coupling invariants do not hold numerically."""
