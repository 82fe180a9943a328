"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class PhotostereoError(Exception):
    exit_code = 1


class InvalidArgumentError(PhotostereoError, ValueError):
    exit_code = 2


class DegeneracyError(PhotostereoError):
    """Rank or conditioning failure in the numerical pipeline."""

    exit_code = 3


class DegenerateLightsError(DegeneracyError):
    """Known light matrix has rank below 3."""


class DegenerateDataError(DegeneracyError):
    """Observation matrix does not span three dimensions."""


class TooFewImagesError(DegeneracyError):
    """Unknown-lighting recovery needs at least 6 images."""


class DegenerateLightingError(DegeneracyError):
    """Gram system is rank deficient (e.g. lights on an exact ring)."""


class InconsistentDataError(DegeneracyError):
    """Estimated Gram matrix is too indefinite to be repaired."""


class GrazingNormalError(DegeneracyError):
    def __init__(self, message, pixels=()):
        super().__init__(message)
        self.pixels = list(pixels)


class ConvergenceError(PhotostereoError):
    exit_code = 4
