"""Exception hierarchy shared by all modules."""


class NessKuboError(Exception):
    """Base class for all library errors."""


class ConfigError(NessKuboError, ValueError):
    """Invalid user input: missing potential values, bad parameters, bad config files."""


class UnsupportedOperationError(NessKuboError):
    """The requested operator does not exist for this geometry (e.g. position on a torus)."""


class SiteRangeError(NessKuboError, IndexError):
    """A site, or one of its neighbours, lies outside the truncated box."""


class NumericalError(NessKuboError, RuntimeError):
    """Eigensolver failure or a violated numerical invariant."""


class AssumptionViolation(NumericalError):
    """Input violates a hypothesis of the computation, e.g. touching bands."""
