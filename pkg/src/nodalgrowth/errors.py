"""Exception hierarchy shared by all modules."""


class NodalGrowthError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(NodalGrowthError, ValueError):
    """Invalid configuration or parameter value."""


class ConvergenceError(NodalGrowthError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""


# geometry
class RadiusTooLarge(ConfigError):
    pass


class InvalidCount(ConfigError):
    pass


# eigenbasis
class LevelOutOfRange(ConfigError):
    pass


class SurfaceMismatch(ConfigError):
    pass


class StepTooLarge(ConfigError):
    pass


class PoleProximity(ConfigError):
    pass


# nodal
class ResolutionTooCoarse(ConfigError):
    pass


class SamplingTooCoarse(UserWarning):
    """Zero count changed when the angular sampling was doubled."""


# growth
class DegenerateInnerNorm(ConvergenceError):
    pass


class TooManyDegenerate(ConvergenceError):
    pass


# disklab
class CoincidentPoints(ConfigError):
    pass


class QuadratureNotConverged(ConvergenceError):
    pass


class InvalidRadii(ConfigError):
    pass


class PotentialTooLarge(ConfigError):
    pass


# experiments
class EmptyInput(ConfigError):
    pass
