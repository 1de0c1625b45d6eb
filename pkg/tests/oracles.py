"""Naive reference implementations used to verify the fast library code.

Everything here is deliberately written the slow, obvious way: scalar Python
loops, explicit index clamping, breadth-first search. No shared code with the
package beyond the documented conventions (replicate borders, rounding rule,
threshold semantics), so a bug in the vectorized implementations cannot hide
in its own oracle.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

SOBEL_KX = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]]
SOBEL_KY = [[-1, -2, -1], [0, 0, 0], [1, 2, 1]]


def u8(v: float) -> int:
    """Round half away from zero, clamp to [0, 255]."""
    r = math.floor(v + 0.5) if v >= 0 else math.ceil(v - 0.5)
    return max(0, min(255, int(r)))


def oracle_gaussian_weights(sigma_x: float, sigma_y: float) -> tuple[int, list[list[float]]]:
    radius = math.ceil(3.0 * max(sigma_x, sigma_y))
    size = 2 * radius + 1
    weights = [[0.0] * size for _ in range(size)]
    total = 0.0
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            w = (1.0 / (2.0 * math.pi * sigma_x * sigma_y)) * math.exp(
                -(dx * dx / (2.0 * sigma_x * sigma_x) + dy * dy / (2.0 * sigma_y * sigma_y))
            )
            weights[dy + radius][dx + radius] = w
            total += w
    for row in weights:
        for i in range(size):
            row[i] /= total
    return radius, weights


def _clamp(v: int, lo: int, hi: int) -> int:
    return max(lo, min(hi, v))


def oracle_gaussian_blur(pixels: np.ndarray, sigma: float) -> np.ndarray:
    """Replicate-border blur of an (h, w, c) uint8 array, rounded per sample."""
    radius, weights = oracle_gaussian_weights(sigma, sigma)
    h, w, c = pixels.shape
    out = np.zeros_like(pixels)
    for ch in range(c):
        for y in range(h):
            for x in range(w):
                acc = 0.0
                for dy in range(-radius, radius + 1):
                    for dx in range(-radius, radius + 1):
                        yy = _clamp(y + dy, 0, h - 1)
                        xx = _clamp(x + dx, 0, w - 1)
                        acc += weights[dy + radius][dx + radius] * float(pixels[yy, xx, ch])
                out[y, x, ch] = u8(acc)
    return out


def oracle_sobel(gray: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """fx, fy, |fx|+|fy|, atan2(fy, fx) of an (h, w) uint8 plane."""
    h, w = gray.shape
    fx = np.zeros((h, w), dtype=np.int64)
    fy = np.zeros((h, w), dtype=np.int64)
    for y in range(h):
        for x in range(w):
            sx = 0
            sy = 0
            for ky in range(3):
                for kx in range(3):
                    yy = _clamp(y + ky - 1, 0, h - 1)
                    xx = _clamp(x + kx - 1, 0, w - 1)
                    sx += SOBEL_KX[ky][kx] * int(gray[yy, xx])
                    sy += SOBEL_KY[ky][kx] * int(gray[yy, xx])
            fx[y, x] = sx
            fy[y, x] = sy
    mag = np.abs(fx) + np.abs(fy)
    direction = np.zeros((h, w), dtype=np.float64)
    for y in range(h):
        for x in range(w):
            direction[y, x] = math.atan2(float(fy[y, x]), float(fx[y, x]))
    return fx, fy, mag, direction


def oracle_unsharp(gray: np.ndarray, amount: float, sigma: float) -> np.ndarray:
    blurred = oracle_gaussian_blur(gray[:, :, np.newaxis], sigma)[:, :, 0]
    h, w = gray.shape
    out = np.zeros_like(gray)
    for y in range(h):
        for x in range(w):
            v = float(gray[y, x]) + amount * (float(gray[y, x]) - float(blurred[y, x]))
            out[y, x] = u8(v)
    return out


# the four quantized gradient directions, as the (dx, dy) step toward the
# "forward" neighbor; backward is the negation
_NMS_STEPS = [(1, 0), (1, 1), (0, 1), (-1, 1)]


def _direction_bin(angle_rad: float) -> int:
    deg = math.degrees(angle_rad) % 180.0
    if 22.5 <= deg < 67.5:
        return 1
    if 67.5 <= deg < 112.5:
        return 2
    if 112.5 <= deg < 157.5:
        return 3
    return 0


def oracle_canny(
    gray: np.ndarray, sigma: float = 1.4, t_low: float = 80.0, t_high: float = 140.0
) -> np.ndarray:
    """Full reference pipeline; returns the boolean edge map."""
    blurred = oracle_gaussian_blur(gray[:, :, np.newaxis], sigma)[:, :, 0]
    _, _, mag, direction = oracle_sobel(blurred)
    h, w = gray.shape

    def mag_at(y: int, x: int) -> float:
        if 0 <= y < h and 0 <= x < w:
            return float(mag[y, x])
        return 0.0

    survivors = np.zeros((h, w), dtype=bool)
    for y in range(h):
        for x in range(w):
            dx, dy = _NMS_STEPS[_direction_bin(direction[y, x])]
            fwd = mag_at(y + dy, x + dx)
            back = mag_at(y - dy, x - dx)
            # tie rule: keep against the forward neighbor, lose against backward
            if float(mag[y, x]) >= fwd and float(mag[y, x]) > back:
                survivors[y, x] = True

    edge = np.zeros((h, w), dtype=bool)
    queue = deque()
    for y in range(h):
        for x in range(w):
            if survivors[y, x] and mag[y, x] >= t_high:
                edge[y, x] = True
                queue.append((y, x))
    while queue:
        y, x = queue.popleft()
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w and not edge[yy, xx]:
                    if survivors[yy, xx] and mag[yy, xx] >= t_low:
                        edge[yy, xx] = True
                        queue.append((yy, xx))
    return edge


def oracle_pconv(
    x: np.ndarray,
    mask: np.ndarray,
    weight: np.ndarray,
    bias: np.ndarray,
    stride: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Windowed renormalized convolution; x is (c_in, h, w), mask is (h, w) bools."""
    out_c, in_c, k, _ = weight.shape
    h, w = mask.shape
    pad = k // 2
    out_h = (h + 2 * pad - k) // stride + 1
    out_w = (w + 2 * pad - k) // stride + 1
    out = np.zeros((out_c, out_h, out_w), dtype=np.float64)
    new_mask = np.zeros((out_h, out_w), dtype=bool)
    for i in range(out_h):
        for j in range(out_w):
            window = 0
            valid = 0
            raw = [0.0] * out_c
            for ky in range(k):
                for kx in range(k):
                    yy = i * stride - pad + ky
                    xx = j * stride - pad + kx
                    if not (0 <= yy < h and 0 <= xx < w):
                        continue
                    window += 1
                    if mask[yy, xx]:
                        valid += 1
                        for o in range(out_c):
                            for c in range(in_c):
                                raw[o] += weight[o, c, ky, kx] * x[c, yy, xx]
            if valid > 0:
                new_mask[i, j] = True
                for o in range(out_c):
                    out[o, i, j] = raw[o] * (window / valid) + bias[o]
    return out, new_mask


def oracle_color_hist(pixels: np.ndarray) -> list[float]:
    h, w, c = pixels.shape
    counts = [0] * 64
    for y in range(h):
        for x in range(w):
            if c == 1:
                r = g = b = int(pixels[y, x, 0])
            else:
                r, g, b = (int(v) for v in pixels[y, x])
            counts[(r // 64) * 16 + (g // 64) * 4 + (b // 64)] += 1
    total = h * w
    return [v / total for v in counts]


def oracle_equalize(plane: np.ndarray) -> np.ndarray:
    """Integer CDF equalization of a (h, w) uint8 plane."""
    h, w = plane.shape
    counts = [0] * 256
    for y in range(h):
        for x in range(w):
            counts[int(plane[y, x])] += 1
    total = h * w
    mapping = [0] * 256
    cum = 0
    for v in range(256):
        cum += counts[v]
        mapping[v] = (255 * cum) // total
    out = np.zeros_like(plane)
    for y in range(h):
        for x in range(w):
            out[y, x] = mapping[int(plane[y, x])]
    return out


def oracle_histogram_stretch(plane: np.ndarray) -> np.ndarray:
    lo = int(plane.min())
    hi = int(plane.max())
    if lo == hi:
        return plane.copy()
    h, w = plane.shape
    out = np.zeros_like(plane)
    for y in range(h):
        for x in range(w):
            out[y, x] = u8((int(plane[y, x]) - lo) * 255.0 / (hi - lo))
    return out
