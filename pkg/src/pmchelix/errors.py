"""Exception hierarchy shared by all modules."""


class PmcHelixError(ValueError):
    """Base class for workbench errors."""


class PreconditionError(PmcHelixError):
    """An input violates an operation's documented precondition."""


class BaseMismatchError(PmcHelixError):
    """Two ambient vectors live at different base points."""


class UnsupportedCurveError(PmcHelixError):
    """Requested curve is not a circle of the space form (e.g. a horocycle)."""


class DomainError(PmcHelixError):
    """Parameter point outside the immersion's domain."""


class RankError(PmcHelixError):
    """The differential of the immersion is degenerate."""


class ParameterError(PmcHelixError):
    """Invalid construction parameters."""


class IntegrationError(PmcHelixError):
    """Frame integration drifted beyond its tolerance."""

    def __init__(self, message, worst_node=None, drift=None):
        super().__init__(message)
        self.worst_node = worst_node
        self.drift = drift
