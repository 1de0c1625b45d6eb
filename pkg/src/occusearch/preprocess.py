"""Case-based image enhancement and edge detection.

Color inputs get luminance-only histogram equalization; grayscale inputs get
unsharp masking followed by histogram stretching. Both paths finish with a
Canny edge pass (Gaussian smoothing, Sobel gradients with the L1 magnitude
approximation, non-maximum suppression, hysteresis tracking) whose default
thresholds are t_low=80, t_high=140.

All convolutions use replicate-edge padding and operate in float64 (Gaussian)
or exact integers (Sobel), so results are deterministic and reproducible by a
naive double-loop evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParamsError, InvalidSigmaError, ShapeMismatchError
from .image import (
    ImageBuffer,
    YCbCrBuffer,
    round_to_u8,
    rgb_to_ycbcr,
    to_grayscale,
    ycbcr_to_rgb,
)

__all__ = [
    "GaussianKernel",
    "GradientField",
    "EdgeMap",
    "CannyParams",
    "PreprocessReport",
    "gaussian_point",
    "gaussian_kernel",
    "gaussian_blur",
    "sobel_gradient",
    "canny",
    "canny_with_gradient",
    "histogram_stretch",
    "equalize_luma",
    "equalize_ycbcr",
    "equalize_color",
    "unsharp_mask",
    "preprocess_auto",
    "edge_map_to_image",
]

SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.int64)
SOBEL_Y = SOBEL_X.T

# Near-zero chroma variance below which a 3-channel image is routed down the
# grayscale path (mean squared Cb/Cr deviation from 128).
CHROMA_MSD_THRESHOLD = 1.0


@dataclass(frozen=True)
class GaussianKernel:
    """Normalized 2-D Gaussian mask sampled at integer offsets."""

    sigma_x: float
    sigma_y: float
    radius: int
    weights: np.ndarray  # (2*radius+1, 2*radius+1) float64, sums to 1


@dataclass(frozen=True)
class GradientField:
    """Per-pixel Sobel responses with the L1 magnitude approximation."""

    fx: np.ndarray  # signed, exact integers stored as float64
    fy: np.ndarray
    magnitude: np.ndarray  # |fx| + |fy|
    direction: np.ndarray  # atan2(fy, fx), in (-pi, pi]

    @property
    def width(self) -> int:
        return self.fx.shape[1]

    @property
    def height(self) -> int:
        return self.fx.shape[0]


@dataclass(frozen=True)
class EdgeMap:
    """Boolean edge raster aligned with its source image."""

    edge: np.ndarray  # (height, width) bool

    @property
    def width(self) -> int:
        return self.edge.shape[1]

    @property
    def height(self) -> int:
        return self.edge.shape[0]

    @property
    def edge_count(self) -> int:
        return int(self.edge.sum())


@dataclass(frozen=True)
class CannyParams:
    sigma: float = 1.4
    t_low: float = 80.0
    t_high: float = 140.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidParamsError(f"sigma must be positive and finite, got {self.sigma}")
        if not (0 < self.t_low <= self.t_high):
            raise InvalidParamsError(
                f"thresholds must satisfy 0 < t_low <= t_high, got ({self.t_low}, {self.t_high})"
            )


@dataclass
class PreprocessReport:
    """Outcome of the case-based enhancement pass."""

    mode: str  # "color" | "grayscale"
    steps: list[str] = field(default_factory=list)
    output: ImageBuffer | None = None
    edges: EdgeMap | None = None


def gaussian_point(dx: float, dy: float, sigma_x: float, sigma_y: float) -> float:
    """2-D Gaussian density with mean (0, 0) evaluated at one offset."""
    return math.exp(-(dx * dx / (2 * sigma_x * sigma_x) + dy * dy / (2 * sigma_y * sigma_y))) / (
        2 * math.pi * sigma_x * sigma_y
    )


def gaussian_kernel(sigma_x: float, sigma_y: float) -> GaussianKernel:
    """Sample the Gaussian at integer offsets out to ceil(3*max(sigma)) and normalize."""
    for s in (sigma_x, sigma_y):
        if not (isinstance(s, (int, float)) and math.isfinite(s) and s > 0):
            raise InvalidSigmaError(f"sigma must be positive and finite, got {s}")
    radius = max(1, math.ceil(3 * max(sigma_x, sigma_y)))
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    dx = offsets[np.newaxis, :]
    dy = offsets[:, np.newaxis]
    weights = np.exp(-(dx**2 / (2 * sigma_x**2) + dy**2 / (2 * sigma_y**2)))
    weights /= 2 * math.pi * sigma_x * sigma_y
    weights /= weights.sum()
    return GaussianKernel(float(sigma_x), float(sigma_y), radius, weights)


def _correlate_replicate(plane: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """2-D correlation with replicate-edge padding; dtype follows the inputs."""
    kh, kw = kernel.shape
    ry, rx = kh // 2, kw // 2
    h, w = plane.shape
    padded = np.pad(plane, ((ry, ry), (rx, rx)), mode="edge")
    out = np.zeros((h, w), dtype=np.result_type(plane.dtype, kernel.dtype))
    for oy in range(kh):
        for ox in range(kw):
            k = kernel[oy, ox]
            if k != 0:
                out += k * padded[oy : oy + h, ox : ox + w]
    return out

def gaussian_blur(img: ImageBuffer, kernel: GaussianKernel) -> ImageBuffer:
    """Per-channel Gaussian smoothing, rounded back to 8 bits."""
    out = np.empty_like(img.pixels)
    for c in range(img.channels):
        acc = _correlate_replicate(img.pixels[:, :, c].astype(np.float64), kernel.weights)
        out[:, :, c] = round_to_u8(acc)
    return ImageBuffer(out)


def sobel_gradient(img: ImageBuffer) -> GradientField:
    """Standard 3x3 Sobel responses on a single-channel image.

    fx and fy are exact integers (replicate borders), magnitude is the
    L1 approximation |fx| + |fy|, direction is atan2(fy, fx).
    """
    if img.channels != 1:
        raise ShapeMismatchError("sobel_gradient requires a single-channel image")
    plane = img.pixels[:, :, 0].astype(np.int64)
    fx = _correlate_replicate(plane, SOBEL_X).astype(np.float64)
    fy = _correlate_replicate(plane, SOBEL_Y).astype(np.float64)
    magnitude = np.abs(fx) + np.abs(fy)
    direction = np.arctan2(fy, fx)
    return GradientField(fx, fy, magnitude, direction)


def _nms_direction_bins(direction: np.ndarray) -> np.ndarray:
    """Quantize gradient angles to 4 bins: 0, 45, 90, 135 degrees."""
    ang = np.degrees(direction) % 180.0
    bins = np.zeros(ang.shape, dtype=np.int8)
    bins[(ang >= 22.5) & (ang < 67.5)] = 1
    bins[(ang >= 67.5) & (ang < 112.5)] = 2
    bins[(ang >= 112.5) & (ang < 157.5)] = 3
    return bins


def _shifted(mag: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """Magnitude of the neighbor at offset (dx, dy); out-of-bounds reads as 0."""
    h, w = mag.shape
    padded = np.pad(mag, 1, mode="constant")
    return padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]


def _non_maximum_suppression(grad: GradientField) -> np.ndarray:
    """Keep pixels whose magnitude is a local maximum along the gradient bin.

    Ties are kept on the forward neighbor (>=) and broken on the backward
    neighbor (>), so a two-pixel plateau thins to a one-pixel line.
    """
    bins = _nms_direction_bins(grad.direction)
    mag = grad.magnitude
    forward_offsets = [(1, 0), (1, 1), (0, 1), (-1, 1)]
    forward = np.zeros_like(mag)
    backward = np.zeros_like(mag)
    for b, (dx, dy) in enumerate(forward_offsets):
        sel = bins == b
        forward[sel] = _shifted(mag, dx, dy)[sel]
        backward[sel] = _shifted(mag, -dx, -dy)[sel]
    return (mag >= forward) & (mag > backward)


def _hysteresis(mag: np.ndarray, survivors: np.ndarray, t_low: float, t_high: float) -> np.ndarray:
    """Grow strong seeds (>= t_high) through 8-connected weak pixels (>= t_low)."""
    weak = survivors & (mag >= t_low)
    visited = survivors & (mag >= t_high)
    while True:
        padded = np.pad(visited, 1, mode="constant")
        h, w = visited.shape
        dilated = np.zeros_like(visited)
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                dilated |= padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]
        grown = dilated & weak
        if np.array_equal(grown, visited):
            return visited
        visited = grown


def canny_with_gradient(
    img: ImageBuffer, params: CannyParams | None = None
) -> tuple[EdgeMap, GradientField]:
    """Run the full edge pipeline, returning the gradient field alongside."""
    params = params or CannyParams()
    gray = to_grayscale(img) if img.channels == 3 else img
    kernel = gaussian_kernel(params.sigma, params.sigma)
    smoothed = gaussian_blur(gray, kernel)
    grad = sobel_gradient(smoothed)
    survivors = _non_maximum_suppression(grad)
    edge = _hysteresis(grad.magnitude, survivors, params.t_low, params.t_high)
    return EdgeMap(edge), grad


def canny(img: ImageBuffer, params: CannyParams | None = None) -> EdgeMap:
    """Gaussian filtering, Sobel gradients, NMS, then hysteresis tracking."""
    edge, _ = canny_with_gradient(img, params)
    return edge


def histogram_stretch(img: ImageBuffer) -> ImageBuffer:
    """Linearly remap the observed [min, max] range onto [0, 255].

    A constant image is returned unchanged (the remap would divide by zero).
    """
    if img.channels != 1:
        raise ShapeMismatchError("histogram_stretch requires a single-channel image")
    plane = img.pixels[:, :, 0]
    g_min = int(plane.min())
    g_max = int(plane.max())
    if g_min == g_max:
        return ImageBuffer(img.pixels.copy())
    stretched = (plane.astype(np.float64) - g_min) * 255.0 / (g_max - g_min)
    return ImageBuffer(round_to_u8(stretched)[:, :, np.newaxis])


def equalize_luma(plane: np.ndarray) -> np.ndarray:
    """CDF-based histogram equalization of one 8-bit plane.

    Maps level v to floor(255 * CDF(v)), computed in exact integer
    arithmetic so boundary levels never wobble with float error.
    """
    plane = np.asarray(plane, dtype=np.uint8)
    hist = np.bincount(plane.reshape(-1), minlength=256).astype(np.int64)
    cum = np.cumsum(hist)
    mapping = (255 * cum) // int(cum[-1])
    return mapping.astype(np.uint8)[plane]


def equalize_ycbcr(buf: YCbCrBuffer) -> YCbCrBuffer:
    """Equalize the Y plane only; chroma planes pass through untouched."""
    return YCbCrBuffer(equalize_luma(buf.y), buf.cb, buf.cr)


def equalize_color(img: ImageBuffer) -> ImageBuffer:
    """Luminance-only histogram equalization of a color image.

    The image is moved into YCbCr, the Y plane is equalized, and Cb/Cr are
    carried over bit-exact before converting back, so hue is preserved while
    contrast spreads over the full range.
    """
    if img.channels != 3:
        raise ShapeMismatchError("equalize_color requires a 3-channel image")
    return ycbcr_to_rgb(equalize_ycbcr(rgb_to_ycbcr(img)))


def unsharp_mask(img: ImageBuffer, amount: float = 1.0, sigma: float = 1.0) -> ImageBuffer:
    """Sharpen by adding back the detail layer: img + amount*(img - blur)."""
    if img.channels != 1:
        raise ShapeMismatchError("unsharp_mask requires a single-channel image")
    if not (math.isfinite(amount) and amount >= 0):
        raise InvalidParamsError(f"amount must be >= 0, got {amount}")
    blurred = gaussian_blur(img, gaussian_kernel(sigma, sigma))
    base = img.pixels[:, :, 0].astype(np.float64)
    detail = base - blurred.pixels[:, :, 0].astype(np.float64)
    return ImageBuffer(round_to_u8(base + amount * detail)[:, :, np.newaxis])


def chroma_deviation(img: ImageBuffer) -> float:
    """Mean squared Cb/Cr deviation from neutral (128)."""
    buf = rgb_to_ycbcr(img)
    cb = buf.cb.astype(np.float64) - 128.0
    cr = buf.cr.astype(np.float64) - 128.0
    return float((np.mean(cb * cb) + np.mean(cr * cr)) / 2.0)


def preprocess_auto(
    img: ImageBuffer, params: CannyParams | None = None, mode: str = "auto"
) -> PreprocessReport:
    """Route an image down the color or grayscale enhancement path.

    Color path: luminance equalization, then edge detection. Grayscale path
    (single-channel inputs, or color inputs with near-zero chroma): unsharp
    masking, then histogram stretching, then edge detection. The edge map of
    the enhanced image is kept in the report.

    mode "auto" routes by chroma; "color" and "gray" force a path (forcing
    color promotes single-channel input to 3 replicated channels first).
    """
    if mode not in ("auto", "color", "gray"):
        raise InvalidParamsError(f"unknown preprocess mode {mode!r}")
    params = params or CannyParams()
    if mode == "auto":
        is_color = img.channels == 3 and chroma_deviation(img) >= CHROMA_MSD_THRESHOLD
    else:
        is_color = mode == "color"
    if is_color and img.channels == 1:
        img = ImageBuffer(np.repeat(img.pixels, 3, axis=2))
    steps: list[str] = []
    if is_color:
        output = equalize_color(img)
        steps.append("equalize_color")
        mode = "color"
    else:
        work = img
        if work.channels == 3:
            work = to_grayscale(work)
            steps.append("to_grayscale")
        work = unsharp_mask(work, amount=1.0, sigma=1.0)
        steps.append("unsharp_mask")
        output = histogram_stretch(work)
        steps.append("histogram_stretch")
        mode = "grayscale"
    edges = canny(output, params)
    steps.append("canny")
    return PreprocessReport(mode=mode, steps=steps, output=output, edges=edges)


def edge_map_to_image(edge: EdgeMap) -> ImageBuffer:
    """Render an edge map as a black/white grayscale image."""
    samples = np.where(edge.edge, 255, 0).astype(np.uint8)
    return ImageBuffer(samples[:, :, np.newaxis])
