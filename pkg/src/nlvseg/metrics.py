"""Benchmark metrics: average pixel error and intersection-over-union."""
from __future__ import annotations

from typing import Sequence

import numpy as np


def _check(result, ground_truth):
    if len(result) != len(ground_truth):
        raise ValueError(f"frame count mismatch: {len(result)} vs {len(ground_truth)}")
    for a, b in zip(result, ground_truth):
        if np.shape(a) != np.shape(b):
            raise ValueError(f"mask dimension mismatch: {np.shape(a)} vs {np.shape(b)}")


def pixel_errors(result, ground_truth) -> np.ndarray:
    _check(result, ground_truth)
    return np.array([np.count_nonzero(np.asarray(a).astype(bool) ^ np.asarray(b).astype(bool))
                     for a, b in zip(result, ground_truth)], dtype=np.float64)


def average_pixel_error(result, ground_truth) -> float:
    """Mean number of mislabelled pixels per frame."""
    return float(pixel_errors(result, ground_truth).mean())


def frame_iou(a, b) -> float:
    a = np.asarray(a).astype(bool)
    b = np.asarray(b).astype(bool)
    union = np.count_nonzero(a | b)
    if union == 0:
        return 1.0
    return np.count_nonzero(a & b) / union


def iou(result, ground_truth, frames: Sequence[int] | None = None) -> float:
    """Mean IoU over ``frames`` (all frames when None); two empty masks score 1."""
    _check(result, ground_truth)
    idx = range(len(result)) if frames is None else frames
    return float(np.mean([frame_iou(result[i], ground_truth[i]) for i in idx]))
