"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """An invalid parameter combination, unknown name or malformed setting."""


class InvalidObservationError(ValueError):
    """A path observation cannot produce a payoff (e.g. an empty Asian average)."""


class EmptySampleError(ValueError):
    """An estimator was asked to summarise zero values."""


class IncompleteReductionError(RuntimeError):
    """A reduction was attempted with one or more partials missing."""


class InsufficientTraceError(ValueError):
    """A power trace has fewer than two samples."""


class MalformedTraceError(ValueError):
    """A power trace has decreasing timestamps or negative power."""


class InvalidEnergyError(ValueError):
    """Energy must be strictly positive to compute an efficiency."""


class DataParseError(ValueError):
    """A bundled or user-supplied data file could not be parsed.

    ``path`` and ``line`` locate the offending record when known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
            if line is not None:
                where += f"{line}:"
            where += " "
        super().__init__(where + message)


class EmptyDataError(DataParseError):
    """A data file has no content at all."""


class UnprofileableTaskError(ValueError):
    """A task has neither measurements nor a local executor."""


class InfeasibleWorkloadError(RuntimeError):
    """No platform satisfies the workload constraints."""


class PlanIntegrityError(ValueError):
    """A partition plan allocates work to a device without a measurement."""
