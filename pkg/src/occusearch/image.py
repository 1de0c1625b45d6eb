"""Raster image values, color conversion, and lossless PNG I/O.

Pixel data lives in numpy arrays:

* :class:`ImageBuffer` — ``(height, width, channels)`` uint8, channels 1 or 3.
* :class:`MaskImage`   — ``(height, width)`` bool; True = valid pixel, False = hole.
* :class:`YCbCrBuffer` — three ``(height, width)`` uint8 planes.

File conventions (the only on-disk formats this package reads or writes):

* Images are 8-bit grayscale or 8-bit truecolor PNG. RGBA/LA inputs are
  accepted with alpha discarded (no compositing); palette images are
  expanded to RGB. 16-bit depths are rejected.
* Masks are 8-bit grayscale PNG where a sample >= 128 means valid and
  < 128 means hole.

Rounding convention everywhere: round half away from zero, then clamp to
[0, 255].
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import MalformedFileError, ShapeMismatchError, UnsupportedFormatError

__all__ = [
    "ImageBuffer",
    "MaskImage",
    "YCbCrBuffer",
    "decode_image",
    "encode_png",
    "to_grayscale",
    "rgb_to_ycbcr",
    "ycbcr_to_rgb",
    "round_to_u8",
    "decode_mask",
    "encode_mask",
]

# Pillow modes we can map onto 8-bit gray/RGB without losing sample values.
_GRAY_MODES = {"L": "L", "LA": "L", "1": "L"}
_COLOR_MODES = {"RGB": "RGB", "RGBA": "RGB", "P": "RGB", "PA": "RGB"}
_UNSUPPORTED_MODES = {"I", "I;16", "I;16B", "I;16L", "I;16N", "F"}


def round_to_u8(values: np.ndarray) -> np.ndarray:
    """Round half away from zero and clamp to [0, 255], returning uint8."""
    arr = np.asarray(values, dtype=np.float64)
    rounded = np.where(arr >= 0, np.floor(arr + 0.5), np.ceil(arr - 0.5))
    return np.clip(rounded, 0, 255).astype(np.uint8)


@dataclass(frozen=True)
class ImageBuffer:
    """Dense 8-bit raster, 1 (gray) or 3 (RGB) channels, row-major."""

    pixels: np.ndarray  # (height, width, channels) uint8

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels)
        if px.ndim == 2:
            px = px[:, :, np.newaxis]
        if px.ndim != 3 or px.shape[2] not in (1, 3):
            raise ValueError(f"pixels must be (h, w, 1|3), got shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image dimensions must be >= 1")
        if px.dtype != np.uint8:
            if px.min() < 0 or px.max() > 255:
                raise ValueError("samples must lie in [0, 255]")
            px = px.astype(np.uint8)
        object.__setattr__(self, "pixels", np.ascontiguousarray(px))

    @classmethod
    def from_flat(cls, width: int, height: int, channels: int, data) -> "ImageBuffer":
        arr = np.asarray(data, dtype=np.uint8).reshape(height, width, channels)
        return cls(arr)

    @classmethod
    def full(cls, width: int, height: int, channels: int, value: int = 0) -> "ImageBuffer":
        return cls(np.full((height, width, channels), value, dtype=np.uint8))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    @property
    def data(self) -> np.ndarray:
        """Flat row-major sample view, length width*height*channels."""
        return self.pixels.reshape(-1)

    def same_dims(self, other: "ImageBuffer | MaskImage") -> bool:
        return self.width == other.width and self.height == other.height

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ImageBuffer):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )


@dataclass(frozen=True)
class MaskImage:
    """Per-pixel validity: True = known pixel, False = hole to restore."""

    valid: np.ndarray  # (height, width) bool

    def __post_init__(self) -> None:
        v = np.asarray(self.valid)
        if v.ndim != 2:
            raise ValueError(f"mask must be 2-D, got shape {v.shape}")
        object.__setattr__(self, "valid", np.ascontiguousarray(v.astype(bool)))

    @classmethod
    def all_valid(cls, width: int, height: int) -> "MaskImage":
        return cls(np.ones((height, width), dtype=bool))

    @property
    def width(self) -> int:
        return self.valid.shape[1]

    @property
    def height(self) -> int:
        return self.valid.shape[0]

    @property
    def valid_count(self) -> int:
        return int(self.valid.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MaskImage):
            return NotImplemented
        return self.valid.shape == other.valid.shape and bool(
            np.array_equal(self.valid, other.valid)
        )


@dataclass(frozen=True)
class YCbCrBuffer:
    """Full-range YCbCr planes, 8 bits each."""

    y: np.ndarray
    cb: np.ndarray
    cr: np.ndarray

    def __post_init__(self) -> None:
        planes = []
        shape = np.asarray(self.y).shape
        for name in ("y", "cb", "cr"):
            p = np.asarray(getattr(self, name))
            if p.ndim != 2 or p.shape != shape:
                raise ValueError("planes must be 2-D and equally sized")
            planes.append((name, np.ascontiguousarray(p.astype(np.uint8))))
        for name, p in planes:
            object.__setattr__(self, name, p)

    @property
    def width(self) -> int:
        return self.y.shape[1]

    @property
    def height(self) -> int:
        return self.y.shape[0]


def decode_image(data: bytes) -> ImageBuffer:
    """Decode an encoded image file into an :class:`ImageBuffer`.

    PNG is the supported interchange format; anything else Pillow can read
    (e.g. JPEG) is decoded best-effort. Alpha channels are dropped, palettes
    expanded. Raises :class:`MalformedFileError` for undecodable bytes and
    :class:`UnsupportedFormatError` for depths other than 8 bits.
    """
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except UnidentifiedImageError as exc:
        raise MalformedFileError("cannot decode image: not a recognized image format") from exc
    except (OSError, ValueError) as exc:
        raise MalformedFileError(f"cannot decode image: {exc}") from exc

    mode = img.mode
    if mode in _UNSUPPORTED_MODES:
        raise UnsupportedFormatError(f"unsupported pixel format {mode!r} (8-bit only)")
    if mode in _GRAY_MODES:
        arr = np.asarray(img.convert("L"), dtype=np.uint8)[:, :, np.newaxis]
    elif mode in _COLOR_MODES:
        arr = np.asarray(img.convert("RGB"), dtype=np.uint8)
    else:
        raise UnsupportedFormatError(f"unsupported pixel format {mode!r}")
    return ImageBuffer(arr)


def encode_png(img: ImageBuffer) -> bytes:
    """Encode losslessly as PNG; decoding the result is bit-exact."""
    if img.channels == 1:
        pil = Image.fromarray(img.pixels[:, :, 0], mode="L")
    else:
        pil = Image.fromarray(img.pixels, mode="RGB")
    buf = io.BytesIO()
    pil.save(buf, format="PNG")
    return buf.getvalue()


def to_grayscale(img: ImageBuffer) -> ImageBuffer:
    """Collapse to one channel: round(0.299 R + 0.587 G + 0.114 B).

    One-channel inputs are returned as an identity copy, which makes the
    operation idempotent.
    """
    if img.channels == 1:
        return ImageBuffer(img.pixels.copy())
    rgb = img.pixels.astype(np.float64)
    gray = 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]
    return ImageBuffer(round_to_u8(gray)[:, :, np.newaxis])


def rgb_to_ycbcr(img: ImageBuffer) -> YCbCrBuffer:
    """Full-range BT.601 forward transform, rounded to 8-bit planes."""
    if img.channels != 3:
        raise ShapeMismatchError("rgb_to_ycbcr requires a 3-channel image")
    rgb = img.pixels.astype(np.float64)
    r, g, b = rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b
    return YCbCrBuffer(round_to_u8(y), round_to_u8(cb), round_to_u8(cr))


def ycbcr_to_rgb(buf: YCbCrBuffer) -> ImageBuffer:
    """Full-range BT.601 inverse transform, rounded and clamped."""
    y = buf.y.astype(np.float64)
    cb = buf.cb.astype(np.float64) - 128.0
    cr = buf.cr.astype(np.float64) - 128.0
    r = y + 1.402 * cr
    g = y - 0.344136 * cb - 0.714136 * cr
    b = y + 1.772 * cb
    return ImageBuffer(np.stack([round_to_u8(r), round_to_u8(g), round_to_u8(b)], axis=2))


def decode_mask(data: bytes) -> MaskImage:
    """Read a mask PNG: sample >= 128 means valid, < 128 means hole.

    Color masks are tolerated by collapsing to grayscale first.
    """
    img = decode_image(data)
    gray = to_grayscale(img)
    return MaskImage(gray.pixels[:, :, 0] >= 128)


def encode_mask(mask: MaskImage) -> bytes:
    """Write a mask as 8-bit grayscale PNG (valid=255, hole=0)."""
    samples = np.where(mask.valid, 255, 0).astype(np.uint8)
    return encode_png(ImageBuffer(samples[:, :, np.newaxis]))
