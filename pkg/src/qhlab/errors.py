"""Exception hierarchy for qhlab."""


class QhlabError(Exception):
    """Base class for all qhlab errors."""


class ArgumentError(QhlabError):
    """Invalid argument (empty list, too few points, bad parameter)."""


class MembershipError(QhlabError):
    """A point was required to lie in a domain but does not."""


class DegenerateError(QhlabError):
    """Coincident points or a collapsed configuration made a ratio undefined."""


class UnsupportedConfigurationError(QhlabError):
    """Input is outside the closed-form support of an exact routine."""


class DiscretizationError(QhlabError):
    """A sampled net came out empty or disconnected."""


class UnreachableError(QhlabError):
    """Shortest-path endpoints lie in different graph components."""


class RangeError(QhlabError):
    """Numeric inversion could not bracket the requested value."""


class EmptyScanError(QhlabError):
    """A scan matched no qualifying tuples."""


class ConfigError(QhlabError):
    """Run configuration is malformed or violates the schema."""
