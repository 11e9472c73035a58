"""Tile augmentation used during triplet generation: degradation and shifting."""

from __future__ import annotations

import numpy as np


def degrade(pixels: np.ndarray, frame_width: int) -> np.ndarray:
    """Replace the outermost ``frame_width`` (0..2) pixel frame with zeros."""
    if frame_width not in (0, 1, 2):
        raise ValueError("frame_width must be 0, 1 or 2")
    if frame_width == 0:
        return pixels
    out = pixels.copy()
    f = frame_width
    out[:f] = 0
    out[-f:] = 0
    out[:, :f] = 0
    out[:, -f:] = 0
    return out


def shift(pixels: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """Translate content by (dx right, dy down), zero-filling vacated pixels."""
    if abs(dx) > 2 or abs(dy) > 2:
        raise ValueError("dx and dy must be within [-2, 2]")
    h, w = pixels.shape[:2]
    out = np.zeros_like(pixels)
    src_r = slice(max(0, -dy), h - max(0, dy))
    src_c = slice(max(0, -dx), w - max(0, dx))
    dst_r = slice(max(0, dy), h - max(0, -dy))
    dst_c = slice(max(0, dx), w - max(0, -dx))
    out[dst_r, dst_c] = pixels[src_r, src_c]
    return out


def random_augment(pixels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Uniform random degradation frame (0-2) plus uniform shift in [-2, 2]^2."""
    out = degrade(pixels, int(rng.integers(0, 3)))
    dx = int(rng.integers(-2, 3))
    dy = int(rng.integers(-2, 3))
    return shift(out, dx, dy)
