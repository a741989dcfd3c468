"""Dense optical flow: coarse-to-fine Horn-Schunck with bilinear warping."""
from __future__ import annotations

import numpy as np
from scipy import ndimage

from .io import DataError, numbered_files, read_flo
from .params import FlowParams

# Weighted neighbour average used by the classic Horn-Schunck iteration.
_HS_KERNEL = np.array([[1 / 12, 1 / 6, 1 / 12],
                       [1 / 6, 0.0, 1 / 6],
                       [1 / 12, 1 / 6, 1 / 12]])


def luma(frame: np.ndarray) -> np.ndarray:
    return frame[..., 0] * 0.299 + frame[..., 1] * 0.587 + frame[..., 2] * 0.114


def warp(image: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Sample ``image`` at ``(x + u, y + v)`` bilinearly, replicating edges."""
    h, w = image.shape
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    return ndimage.map_coordinates(image, [yy + v, xx + u], order=1, mode="nearest")


def _pyramid(image: np.ndarray, levels: int) -> list[np.ndarray]:
    pyr = [image]
    for _ in range(levels - 1):
        prev = pyr[-1]
        if min(prev.shape) < 16:
            break
        blurred = ndimage.gaussian_filter(prev, 1.0, mode="nearest")
        pyr.append(blurred[::2, ::2])
    return pyr


def _upsample_flow(u: np.ndarray, v: np.ndarray, shape) -> tuple[np.ndarray, np.ndarray]:
    zoom = (shape[0] / u.shape[0], shape[1] / u.shape[1])
    u2 = ndimage.zoom(u, zoom, order=1, mode="nearest", grid_mode=True)[: shape[0], : shape[1]]
    v2 = ndimage.zoom(v, zoom, order=1, mode="nearest", grid_mode=True)[: shape[0], : shape[1]]
    return u2 * zoom[1], v2 * zoom[0]


def _refine(i1, i2, u, v, smoothness, iterations):
    i2w = warp(i2, u, v)
    gx1 = ndimage.sobel(i1, axis=1, mode="nearest") / 8.0
    gy1 = ndimage.sobel(i1, axis=0, mode="nearest") / 8.0
    gx2 = ndimage.sobel(i2w, axis=1, mode="nearest") / 8.0
    gy2 = ndimage.sobel(i2w, axis=0, mode="nearest") / 8.0
    ix = 0.5 * (gx1 + gx2)
    iy = 0.5 * (gy1 + gy2)
    it = i2w - i1
    denom = smoothness ** 2 + ix ** 2 + iy ** 2
    u0, v0 = u, v
    for _ in range(iterations):
        ubar = ndimage.correlate(u, _HS_KERNEL, mode="nearest")
        vbar = ndimage.correlate(v, _HS_KERNEL, mode="nearest")
        resid = (ix * (ubar - u0) + iy * (vbar - v0) + it) / denom
        u = ubar - ix * resid
        v = vbar - iy * resid
    return u, v


def estimate_flow(frame_a: np.ndarray, frame_b: np.ndarray, params: FlowParams = FlowParams()) -> np.ndarray:
    """Flow from ``frame_a`` to ``frame_b`` as an ``(H, W, 2)`` float32 (u, v) field.

    Intensities are taken on a 0-255 luma scale, so ``smoothness_weight`` keeps
    its conventional Horn-Schunck magnitude.
    """
    if frame_a.shape != frame_b.shape:
        raise DataError(f"frame dimension mismatch: {frame_a.shape} vs {frame_b.shape}")
    i1 = ndimage.gaussian_filter(luma(frame_a) * 255.0, 0.8, mode="nearest")
    i2 = ndimage.gaussian_filter(luma(frame_b) * 255.0, 0.8, mode="nearest")
    pyr1 = _pyramid(i1, params.pyramid_levels)
    pyr2 = _pyramid(i2, params.pyramid_levels)
    u = np.zeros_like(pyr1[-1])
    v = np.zeros_like(pyr1[-1])
    for level in range(len(pyr1) - 1, -1, -1):
        a, b = pyr1[level], pyr2[level]
        if u.shape != a.shape:
            u, v = _upsample_flow(u, v, a.shape)
        u, v = _refine(a, b, u, v, params.smoothness_weight, params.iterations)
    return np.stack([u, v], axis=-1).astype(np.float32)


def resolve_flows(frames, flow_dir=None, params: FlowParams = FlowParams()) -> list[np.ndarray]:
    """One flow field per consecutive frame pair, read from ``flow_dir`` if given."""
    n_pairs = len(frames) - 1
    if flow_dir is None:
        return [estimate_flow(frames[t], frames[t + 1], params) for t in range(n_pairs)]
    files = numbered_files(flow_dir, (".flo",))
    if len(files) < n_pairs:
        missing = len(files) + 1
        raise DataError(f"missing flow for pair ({missing},{missing + 1})")
    h, w = frames[0].shape[:2]
    flows = []
    for t, path in enumerate(files[:n_pairs]):
        flow = read_flo(path)
        if flow.shape[:2] != (h, w):
            raise DataError(f"{path.name}: flow is {flow.shape[1]}x{flow.shape[0]}, frames are {w}x{h}")
        flows.append(flow)
    return flows
