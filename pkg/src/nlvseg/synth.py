"""Synthetic test sequences: a textured square sliding over a static textured background."""
from __future__ import annotations

import numpy as np
from scipy import ndimage

BACKGROUND_COLOUR = np.array([0.25, 0.35, 0.60])
OBJECT_COLOUR = np.array([0.80, 0.55, 0.25])


def _texture(rng, shape, amplitude, sigma):
    """Smooth brightness noise in [-amplitude, amplitude], shared by all channels."""
    noise = ndimage.gaussian_filter(rng.standard_normal(shape), sigma, mode="wrap")
    noise /= np.abs(noise).max()
    return amplitude * noise[..., None]


def moving_square_sequence(n_frames: int = 10, size: tuple[int, int] = (64, 64), speed: float = 2.0,
                           square: int = 16, seed: int = 0):
    """Frames and exact ground-truth masks for a square moving right at ``speed`` px/frame.

    ``size`` is (width, height). Returns ``(frames, masks)`` with frames in
    [0, 1] and masks in {0, 1}.
    """
    width, height = size
    rng = np.random.default_rng(seed)
    background = np.clip(BACKGROUND_COLOUR + _texture(rng, (height, width), 0.25, 1.0), 0, 1)
    obj = np.clip(OBJECT_COLOUR + _texture(rng, (square, square), 0.25, 1.0), 0, 1)
    travel = speed * (n_frames - 1)
    x0 = max(0.0, (width - square - travel) / 2.0)
    y0 = (height - square) // 2
    frames, masks = [], []
    for t in range(n_frames):
        x = int(round(x0 + speed * t))
        frame = background.copy()
        mask = np.zeros((height, width), dtype=np.uint8)
        xs = slice(max(0, x), min(width, x + square))
        ox = slice(xs.start - x, xs.stop - x)
        frame[y0:y0 + square, xs] = obj[:, ox]
        mask[y0:y0 + square, xs] = 1
        frames.append(frame)
        masks.append(mask)
    return frames, masks
