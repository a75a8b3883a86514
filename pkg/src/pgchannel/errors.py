"""Exception hierarchy shared by all pgchannel modules."""


class PgChannelError(Exception):
    """Base class for all pgchannel errors."""


class InvalidParams(PgChannelError):
    """A parameter violates its documented domain (e.g. sigma <= 0)."""


class NonConvergent(PgChannelError):
    """Adaptive integration exhausted its subdivision budget before
    reaching the requested tolerance."""


class NonFinite(PgChannelError):
    """An integrand returned NaN or infinity inside the integration range."""


class UnsupportedMode(PgChannelError):
    """The requested computation is not defined for the given truncation
    mode (e.g. closed-form moments without the zero term)."""


class DegenerateInput(PgChannelError):
    """The input makes the requested quantity undefined (e.g. normalizing
    an identically-zero density)."""


class Singularity(PgChannelError):
    """A formula's denominator vanishes at the requested point."""


class OutOfDomain(PgChannelError):
    """An inverse trigonometric argument left [-1, 1] by more than the
    numerical grazing tolerance."""


class InsufficientCoverage(PgChannelError):
    """Too many samples fall outside the requested histogram range."""
