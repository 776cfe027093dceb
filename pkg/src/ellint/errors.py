"""Exception types raised across the package."""


class EllintError(Exception):
    pass


class DomainError(EllintError, ValueError):
    pass


class PoleProximity(EllintError, ValueError):
    pass


class ConvergenceError(EllintError, RuntimeError):
    def __init__(self, message, iterates=()):
        super().__init__(message)
        self.iterates = tuple(iterates)


class ResidueError(EllintError, ValueError):
    pass


class ExceptionalParameter(EllintError, ValueError):
    pass


class SamplerExhausted(EllintError, RuntimeError):
    pass


class ArityError(EllintError, ValueError):
    pass


class SearchExhausted(EllintError, RuntimeError):
    pass


class BasisValidationError(EllintError, ValueError):
    pass


class NotApplicable(EllintError):
    pass
