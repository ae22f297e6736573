"""Exception types raised by qcorr."""


class QcorrError(Exception):
    """Base class for qcorr-specific failures."""


class DegenerateLevelError(QcorrError):
    """A quantile filter produced a constant binary series (zero variance).

    Happens for probability levels 0 and 1 and for extreme ties; the
    correlation normalization is undefined in that case.
    """


class DataFormatError(QcorrError):
    """Malformed input data (bad CSV structure, unsorted ticks, bad prices).

    Distinct from a day *rejection*, which is a regular pipeline outcome.
    """
