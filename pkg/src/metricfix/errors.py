"""Exception hierarchy shared by the library and the CLI."""


class MetricfixError(Exception):
    """Base class for every error raised by metricfix."""


class InputError(MetricfixError, ValueError):
    """Malformed input: bad tables, unknown labels, invalid parameters."""


class CapacityError(MetricfixError):
    """A space or profile grid exceeds the configured size cap."""


class NoPathError(MetricfixError):
    """Two points are not connected at the requested scale."""


class EvaluationError(MetricfixError, ArithmeticError):
    """A payoff expression could not be evaluated (e.g. division by zero)."""
