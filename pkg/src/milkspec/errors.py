"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2, malformed
input data exits 3, statistically degenerate input exits 4.
"""


class MilkspecError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(MilkspecError):
    """Invalid or incomplete pipeline configuration."""


class DataFormatError(MilkspecError):
    """Malformed input data: ENVI header/payload, chemistry table, image file."""


class DegenerateDataError(MilkspecError):
    """Structurally valid input that is statistically unusable.

    Examples: zero-variance vector handed to a correlation, a constant
    target handed to the discretizer, an empty group in a summary.
    """


class ConvergenceError(MilkspecError):
    """An iterative solver exhausted its sweep budget without converging."""
