"""Exception types shared across the recognition pipeline.

Two families matter to callers: DataError covers everything caused by the
input (unreadable files, blank images, malformed model/report files) and maps
to CLI exit code 2; the remaining RecognizerError subclasses are contract
violations (bad shapes, bad arguments) surfaced to exit code 3 when they
occur while training.
"""


class RecognizerError(Exception):
    """Base class for all errors raised by this package."""


class DataError(RecognizerError):
    """Input data is missing, unreadable, or degenerate."""


class AllBackground(DataError):
    """Binarization found no foreground pixel below the converged threshold."""


class NoForeground(DataError):
    """A binary mask that must contain ink is empty."""


class UnreadableImage(DataError):
    """An image file could not be parsed."""


class EmptyDataset(DataError):
    """A dataset directory or sample list contains no usable samples."""


class TooFewSamples(DataError):
    """Not enough samples to build the requested fold split."""


class TooFewClasses(DataError):
    """Cross-validation needs at least two classes."""


class FormatError(DataError):
    """A model, report, or feature file is malformed or truncated."""


class VersionMismatch(FormatError):
    """A file declares a format version this code does not understand."""


class InvalidSizes(RecognizerError):
    """Network layer sizes are inconsistent or out of range."""


class DimensionMismatch(RecognizerError):
    """An input vector does not match the expected dimensionality."""


class LengthMismatch(RecognizerError):
    """Parallel sequences (scores, labels, decisions) differ in length."""


class OutOfBounds(RecognizerError):
    """A pixel coordinate lies outside its raster."""


class BadK(RecognizerError):
    """A top-k request with k outside [1, class count]."""


class AllZeroAccuracies(RecognizerError):
    """Ensemble weights cannot be derived when every accuracy is zero."""
