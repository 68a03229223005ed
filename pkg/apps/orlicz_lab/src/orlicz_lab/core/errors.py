"""Exception hierarchy shared by the numerics, verification and CLI layers."""


class OrliczLabError(Exception):
    """Base class for every error raised by orlicz_lab."""


class OverflowDomain(OrliczLabError):
    """A Young function was asked for a value beyond its domain cap."""


class NotInvertible(OrliczLabError):
    """The Young function is not strictly increasing on [0, domain_cap]."""


class InvalidYoungFunction(OrliczLabError):
    """The description does not define an even convex Young function."""


class InvalidMeasure(OrliczLabError):
    """Negative density, bad interval or non-integrable power law."""


class OutOfInterval(OrliczLabError):
    """A point lies outside the interval of a measure."""


class IncompatibleIntervals(OrliczLabError):
    """Two objects that must share an interval do not."""


class ZeroMassError(OrliczLabError):
    """A quantity normalised by a total mass was requested for a null measure."""


class HypothesisFailed(OrliczLabError):
    """A structural hypothesis of a theorem or lemma does not hold."""

    def __init__(self, message: str, hypotheses: dict[str, bool] | None = None):
        super().__init__(message)
        self.hypotheses = hypotheses or {}


class ConfigError(OrliczLabError):
    """An experiment config could not be parsed or validated."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
