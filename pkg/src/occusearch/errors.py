"""Exception types shared across the package.

Every error raised by occusearch derives from :class:`OccuSearchError`,
so callers (CLI, HTTP service) can catch one base class and map the
concrete subclass onto an exit code or API error body.
"""


class OccuSearchError(Exception):
    """Base class for all occusearch errors."""


class MalformedFileError(OccuSearchError):
    """Input bytes could not be decoded as an image."""


class UnsupportedFormatError(OccuSearchError):
    """Image decodes but uses an unsupported pixel format (e.g. 16-bit depth)."""


class InvalidSigmaError(OccuSearchError):
    """Gaussian standard deviation is non-positive or non-finite."""


class InvalidParamsError(OccuSearchError):
    """Operation parameters violate their invariants (e.g. t_low >= t_high)."""


class ShapeMismatchError(OccuSearchError):
    """Paired buffers (image/mask, feature map/layer) disagree on dimensions."""


class EmptyMaskError(OccuSearchError):
    """Mask contains no valid pixels, so inpainting has no boundary data."""


class EmptyCorpusError(OccuSearchError):
    """Training corpus contains no images."""


class StoreError(OccuSearchError):
    """Base class for catalog store failures."""


class StoreLockedError(StoreError):
    """Another process holds the store's advisory lock."""


class StoreCorruptError(StoreError):
    """A non-final index line failed to parse; the store needs manual repair."""


class DuplicateIdError(StoreError):
    """A record with this id already exists in the store."""


class UnknownCategoryError(StoreError):
    """Referenced category id is not registered in the store."""


class NotFoundError(StoreError):
    """No record with the requested id."""


class EmptyStoreError(StoreError):
    """Operation requires at least one catalogued product."""
