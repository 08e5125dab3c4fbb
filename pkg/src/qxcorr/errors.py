"""Exception types shared across the toolkit."""


class QxcorrError(Exception):
    """Base class for all qxcorr errors."""


class DegenerateInput(QxcorrError):
    """An operation that needs signal content received an all-zero signal."""


class DegenerateQuantization(QxcorrError):
    """Quantization mapped an entire signal to zero; widen the step or raise K."""


class InternalOverflow(QxcorrError):
    """A corrected coefficient exceeded its provable bound (packing bug, not user error)."""


class BadLength(QxcorrError):
    """FFT input length is not a power of two."""


class ParseError(QxcorrError):
    """Input file is malformed or truncated."""


class UnsupportedFormat(QxcorrError):
    """Input file parsed but uses an unsupported encoding or channel layout."""


class ConfigError(QxcorrError):
    """Invalid harness or CLI configuration."""
