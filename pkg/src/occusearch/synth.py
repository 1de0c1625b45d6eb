"""Seeded synthetic imagery: a small categorized product corpus, benchmark
damage, and training textures.

The corpus has four categories with distinct base hues and a distinct shape
motif per category, so histogram features cluster cleanly while per-image
jitter, motif geometry, and pixel noise keep the images from being duplicates.
The hue spacing is deliberately moderate: a large occlusion can flip a raw
query's category, which is exactly what the benchmark measures.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .image import ImageBuffer, MaskImage, encode_png, round_to_u8

__all__ = [
    "CATEGORY_NAMES",
    "synthetic_corpus",
    "write_corpus",
    "damage_image",
    "random_textures",
]


@dataclass(frozen=True)
class _CategorySpec:
    name: str
    base: tuple[int, int, int]
    motif: tuple[int, int, int]
    shape: str


_SPECS = [
    _CategorySpec("berry", (208, 48, 48), (120, 16, 48), "disk"),
    _CategorySpec("citrus", (208, 160, 48), (160, 112, 16), "square"),
    _CategorySpec("forest", (48, 160, 48), (16, 80, 16), "triangle"),
    _CategorySpec("ocean", (48, 112, 208), (176, 208, 240), "stripes"),
]

CATEGORY_NAMES = [s.name for s in _SPECS]


def _draw_motif(canvas: np.ndarray, shape: str, color: np.ndarray, rng: np.random.Generator) -> None:
    h, w, _ = canvas.shape
    rows, cols = np.mgrid[0:h, 0:w]
    if shape == "disk":
        cy = rng.integers(h // 3, 2 * h // 3)
        cx = rng.integers(w // 3, 2 * w // 3)
        r = rng.integers(h // 6, h // 4)
        sel = (rows - cy) ** 2 + (cols - cx) ** 2 <= r * r
    elif shape == "square":
        side = int(rng.integers(h // 4, h // 2))
        y0 = int(rng.integers(0, h - side))
        x0 = int(rng.integers(0, w - side))
        sel = (rows >= y0) & (rows < y0 + side) & (cols >= x0) & (cols < x0 + side)
    elif shape == "triangle":
        cut = int(rng.integers(2 * h // 3, 4 * h // 3))
        sel = rows + cols >= cut
    else:  # stripes
        period = int(rng.integers(8, 14))
        phase = int(rng.integers(0, period))
        width = max(2, period // 3)
        sel = ((rows + phase) % period) < width
    canvas[sel] = color


def _corpus_image(spec: _CategorySpec, rng: np.random.Generator, size: int) -> ImageBuffer:
    base = np.array(spec.base, dtype=np.float64) + rng.integers(-20, 21, size=3)
    motif = np.array(spec.motif, dtype=np.float64) + rng.integers(-20, 21, size=3)
    canvas = np.tile(base, (size, size, 1))
    _draw_motif(canvas, spec.shape, motif, rng)
    canvas += rng.normal(0.0, 5.0, size=canvas.shape)
    return ImageBuffer(round_to_u8(canvas))


def synthetic_corpus(
    seed: int = 7, per_category: int = 10, size: int = 64
) -> list[tuple[str, str, ImageBuffer]]:
    """(category, name, image) triples, deterministic for a given seed."""
    rng = np.random.default_rng(seed)
    out = []
    for spec in _SPECS:
        for i in range(per_category):
            out.append((spec.name, f"{spec.name}-{i:02d}", _corpus_image(spec, rng, size)))
    return out


def write_corpus(out_dir, seed: int = 7, per_category: int = 10, size: int = 64) -> int:
    """Write the corpus as <out_dir>/<category>/<name>.png; returns image count."""
    root = Path(out_dir)
    n = 0
    for category, name, img in synthetic_corpus(seed, per_category, size):
        cat_dir = root / category
        cat_dir.mkdir(parents=True, exist_ok=True)
        (cat_dir / f"{name}.png").write_bytes(encode_png(img))
        n += 1
    return n


def damage_image(img: ImageBuffer, mask: MaskImage) -> ImageBuffer:
    """Black out the mask's hole pixels, simulating an occluding object."""
    return ImageBuffer(np.where(mask.valid[:, :, np.newaxis], img.pixels, 0).astype(np.uint8))


def random_textures(n: int, size: int = 32, seed: int = 0) -> list[ImageBuffer]:
    """Smooth colorful textures: low-resolution noise grids blown up with a blur."""
    from .preprocess import gaussian_blur, gaussian_kernel

    rng = np.random.default_rng(seed)
    kernel = gaussian_kernel(2.0, 2.0)
    textures = []
    for _ in range(n):
        coarse = rng.integers(0, 256, size=(4, 4, 3))
        up = np.repeat(np.repeat(coarse, size // 4, axis=0), size // 4, axis=1)
        textures.append(gaussian_blur(ImageBuffer(up.astype(np.uint8)), kernel))
    return textures
