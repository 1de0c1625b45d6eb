"""Structured visual metadata and the similarity measure used by retrieval.

A descriptor is two normalized histograms: a 64-bin RGB color histogram
(4x4x4 quantization) and an 8-bin edge-orientation histogram over Canny edge
pixels. Similarity is a weighted cosine (0.7 color + 0.3 edges) in [0, 1].
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

import numpy as np

from .image import ImageBuffer
from .preprocess import CannyParams, canny_with_gradient

__all__ = [
    "Metadata",
    "COLOR_WEIGHT",
    "EDGE_WEIGHT",
    "color_histogram",
    "edge_orientation_histogram",
    "generate_metadata",
    "similarity",
    "metadata_to_dict",
    "metadata_from_dict",
]

COLOR_BINS = 64  # 4 levels per RGB channel
EDGE_BINS = 8  # orientation bins over [0, pi)
COLOR_WEIGHT = 0.7
EDGE_WEIGHT = 0.3


@dataclass(frozen=True)
class Metadata:
    """Structured descriptor of one image."""

    color_hist: np.ndarray  # 64 floats, sums to 1
    edge_hist: np.ndarray  # 8 floats, sums to 1 (all-zero when edge-free)
    aspect_ratio: float
    width: int
    height: int
    category: str | None = None
    created_at: str = field(default_factory=lambda: _now_iso())

    def with_category(self, category: str | None) -> "Metadata":
        return replace(self, category=category)


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def color_histogram(img: ImageBuffer) -> np.ndarray:
    """64-bin RGB histogram with each channel quantized to 4 levels.

    Single-channel images are promoted to RGB by replication, so grays land
    on the diagonal bins.
    """
    px = img.pixels
    if img.channels == 1:
        px = np.repeat(px, 3, axis=2)
    quant = (px // 64).astype(np.int64)
    idx = quant[:, :, 0] * 16 + quant[:, :, 1] * 4 + quant[:, :, 2]
    counts = np.bincount(idx.reshape(-1), minlength=COLOR_BINS).astype(np.float64)
    return counts / counts.sum()


def edge_orientation_histogram(
    img: ImageBuffer, params: CannyParams | None = None
) -> np.ndarray:
    """8-bin gradient-direction histogram over Canny edge pixels.

    Directions are folded to [0, pi); an image with no edge pixels yields the
    all-zero vector.
    """
    edge_map, grad = canny_with_gradient(img, params)
    mask = edge_map.edge
    if not mask.any():
        return np.zeros(EDGE_BINS, dtype=np.float64)
    folded = np.mod(grad.direction[mask], np.pi)
    bins = np.minimum((folded / (np.pi / EDGE_BINS)).astype(np.int64), EDGE_BINS - 1)
    counts = np.bincount(bins, minlength=EDGE_BINS).astype(np.float64)
    return counts / counts.sum()


def generate_metadata(img: ImageBuffer) -> Metadata:
    """Collect the visual descriptor of an image (no category, fresh timestamp)."""
    return Metadata(
        color_hist=color_histogram(img),
        edge_hist=edge_orientation_histogram(img),
        aspect_ratio=img.width / img.height,
        width=img.width,
        height=img.height,
    )


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 and nb == 0.0:
        return 1.0  # both edge-free: identical in this component
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def similarity(
    a: Metadata,
    b: Metadata,
    color_weight: float = COLOR_WEIGHT,
    edge_weight: float = EDGE_WEIGHT,
) -> float:
    """Weighted cosine similarity in [0, 1]; 1.0 on identical descriptors.

    The weights are overridable for experimentation; the defaults are what
    retrieval and the service use.
    """
    value = color_weight * _cosine(a.color_hist, b.color_hist) + edge_weight * _cosine(
        a.edge_hist, b.edge_hist
    )
    return min(1.0, max(0.0, value))


def metadata_to_dict(m: Metadata) -> dict:
    """JSON-shaped form with the documented field names."""
    return {
        "colorHist": [float(v) for v in m.color_hist],
        "edgeHist": [float(v) for v in m.edge_hist],
        "aspectRatio": m.aspect_ratio,
        "width": m.width,
        "height": m.height,
        "category": m.category,
        "createdAt": m.created_at,
    }


def metadata_from_dict(d: dict) -> Metadata:
    return Metadata(
        color_hist=np.asarray(d["colorHist"], dtype=np.float64),
        edge_hist=np.asarray(d["edgeHist"], dtype=np.float64),
        aspect_ratio=float(d["aspectRatio"]),
        width=int(d["width"]),
        height=int(d["height"]),
        category=d.get("category"),
        created_at=d.get("createdAt", _now_iso()),
    )


def metadata_to_json(m: Metadata) -> str:
    return json.dumps(metadata_to_dict(m))
