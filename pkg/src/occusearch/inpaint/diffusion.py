"""Harmonic hole filling by Jacobi iteration.

Hole pixels relax toward the average of their in-image 4-neighbors while valid
pixels stay pinned, which drives the hole region to the discrete harmonic
interpolant of its boundary. Deterministic, model-free, and bounded by the
valid-pixel value range, it is the default restoration engine.
"""

from __future__ import annotations

import numpy as np

from ..image import ImageBuffer, round_to_u8

__all__ = ["diffusion_inpaint", "DIFFUSION_TOL", "DIFFUSION_MAX_ITERS"]

DIFFUSION_TOL = 0.05
DIFFUSION_MAX_ITERS = 2000


def _neighbor_counts(h: int, w: int) -> np.ndarray:
    counts = np.full((h, w), 4, dtype=np.float64)
    counts[0, :] -= 1
    counts[-1, :] -= 1
    counts[:, 0] -= 1
    counts[:, -1] -= 1
    return counts


def _neighbor_sum(work: np.ndarray) -> np.ndarray:
    s = np.zeros_like(work)
    s[1:, :] += work[:-1, :]
    s[:-1, :] += work[1:, :]
    s[:, 1:] += work[:, :-1]
    s[:, :-1] += work[:, 1:]
    return s


def diffusion_solve(
    pixels: np.ndarray,
    valid: np.ndarray,
    tol: float = DIFFUSION_TOL,
    max_iters: int = DIFFUSION_MAX_ITERS,
) -> tuple[np.ndarray, list[float]]:
    """Run the Jacobi relaxation; returns the float image and per-sweep deltas.

    Hole pixels start at the per-channel mean of the valid pixels. A sweep's
    delta is the mean absolute change over hole entries; iteration stops once
    it drops to ``tol`` or after ``max_iters`` sweeps.
    """
    h, w, c = pixels.shape
    work = pixels.astype(np.float64).copy()
    holes = ~valid
    for ch in range(c):
        work[holes, ch] = float(pixels[valid, ch].mean())

    counts = _neighbor_counts(h, w)[:, :, np.newaxis]
    changes: list[float] = []
    for _ in range(max_iters):
        averaged = _neighbor_sum(work) / counts
        delta = float(np.abs(averaged[holes] - work[holes]).mean())
        work[holes] = averaged[holes]
        changes.append(delta)
        if delta <= tol:
            break
    return work, changes


def diffusion_inpaint(req) -> ImageBuffer:
    """Fill the request's holes by diffusion; valid pixels pass through bit-exact."""
    valid = req.mask.valid
    if valid.all():
        return ImageBuffer(req.image.pixels.copy())
    work, _ = diffusion_solve(req.image.pixels, valid, req.diffusion_tol, req.diffusion_iters)
    filled = round_to_u8(work)
    return ImageBuffer(np.where(valid[:, :, np.newaxis], req.image.pixels, filled))
