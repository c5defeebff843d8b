"""Exception hierarchy shared by all gwpkit modules."""


class GwpError(Exception):
    """Base class for every error raised by gwpkit."""


class AlphabetError(GwpError):
    """A symbol or token is not part of the declared alphabet."""


class ConfigurationError(GwpError):
    """Malformed input data: specs, files, oracle parameters."""


class OracleError(GwpError):
    """A normal-form oracle behaved inconsistently."""


class PreconditionError(GwpError):
    pass


class ConstructionError(GwpError):
    """Building a rewriting system or machine would violate its invariants."""


class InsufficientRadiusError(GwpError):
    """A ball does not reach far enough for the requested comparison."""


class RadiusExceededError(GwpError):
    """A brute-force verdict was requested outside its enumerated radius."""


class ResourceError(GwpError):
    def __init__(self, message, achieved_radius=None):
        super().__init__(message)
        self.achieved_radius = achieved_radius


class InvariantError(GwpError):
    """Internal invariant broken; signals corrupted machine data."""
