"""Motion boundaries from flow, the ray-voting inside-outside map, and distance transforms."""
from __future__ import annotations

import numpy as np
from scipy import ndimage

# The 8 ray directions as (dy, dx), spaced by 45 degrees.
RAY_DIRECTIONS = ((0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1))
_MIN_FLOW_MAGNITUDE = 1e-6


def flow_gradient_norm(flow: np.ndarray) -> np.ndarray:
    """Frobenius norm of the central-difference flow Jacobian (edges replicated)."""
    padded = np.pad(np.asarray(flow, dtype=np.float64), ((1, 1), (1, 1), (0, 0)), mode="edge")
    ddx = (padded[1:-1, 2:] - padded[1:-1, :-2]) / 2.0
    ddy = (padded[2:, 1:-1] - padded[:-2, 1:-1]) / 2.0
    return np.sqrt(np.sum(ddx ** 2 + ddy ** 2, axis=-1))


def boundary_strength(flow: np.ndarray, lambda_m: float) -> np.ndarray:
    return 1.0 - np.exp(-lambda_m * flow_gradient_norm(flow))


def _shifted(arr: np.ndarray, dy: int, dx: int, fill) -> np.ndarray:
    """``out[y, x] = arr[y + dy, x + dx]`` with ``fill`` outside the grid."""
    h, w = arr.shape[:2]
    out = np.full_like(arr, fill)
    ys, yd = (slice(dy, h), slice(0, h - dy)) if dy >= 0 else (slice(0, h + dy), slice(-dy, h))
    xs, xd = (slice(dx, w), slice(0, w - dx)) if dx >= 0 else (slice(0, w + dx), slice(-dx, w))
    out[yd, xd] = arr[ys, xs]
    return out


def direction_difference(flow: np.ndarray, lambda_theta: float) -> np.ndarray:
    """1 - exp(-lambda * max squared angle to the 8-neighbours).

    Angles involving a vector shorter than 1e-6 px count as zero.
    """
    flow = np.asarray(flow, dtype=np.float64)
    mag = np.hypot(flow[..., 0], flow[..., 1])
    moving = mag >= _MIN_FLOW_MAGNITUDE
    max_sq = np.zeros(flow.shape[:2])
    for dy, dx in RAY_DIRECTIONS:
        nb = _shifted(flow, dy, dx, np.nan)
        nb_mag = np.hypot(nb[..., 0], nb[..., 1])
        valid = moving & (nb_mag >= _MIN_FLOW_MAGNITUDE)
        dot = flow[..., 0] * nb[..., 0] + flow[..., 1] * nb[..., 1]
        cross = flow[..., 0] * nb[..., 1] - flow[..., 1] * nb[..., 0]
        theta = np.abs(np.arctan2(cross, dot))
        theta = np.where(valid, theta, 0.0)
        np.maximum(max_sq, theta ** 2, out=max_sq)
    return 1.0 - np.exp(-lambda_theta * max_sq)


def boundary_probability(b_m: np.ndarray, b_theta: np.ndarray, rho: float) -> np.ndarray:
    b_m = np.asarray(b_m, dtype=np.float64)
    b_theta = np.asarray(b_theta, dtype=np.float64)
    if b_m.shape != b_theta.shape:
        raise ValueError("b_m and b_theta must share dimensions")
    return np.where(b_m > rho, b_m, b_m * b_theta)


def binarize_boundary(p: np.ndarray, threshold: float = 0.5) -> np.ndarray:
    return (np.asarray(p) > threshold).astype(np.uint8)


def _ray_crossings(boundary: np.ndarray, dy: int, dx: int) -> np.ndarray:
    """Number of boundary runs met by a ray leaving each pixel along (dy, dx).

    A run starts wherever a boundary pixel follows a non-boundary pixel along
    the ray. Run starts are accumulated from the far border backwards, one
    line of pixels at a time, like a directional integral image.
    """
    b = boundary.astype(bool)
    starts = (b & ~_shifted(b, -dy, -dx, False)).astype(np.int32)
    h, w = b.shape
    counts = np.zeros((h, w), dtype=np.int32)
    # counts[p] = starts[p + d] + counts[p + d]
    if dy != 0:
        rows = range(h - 1, -1, -1) if dy > 0 else range(h)
        for y in rows:
            ny = y + dy
            if not 0 <= ny < h:
                continue
            acc = starts[ny] + counts[ny]
            if dx > 0:
                counts[y, : w - dx] = acc[dx:]
            elif dx < 0:
                counts[y, -dx:] = acc[: w + dx]
            else:
                counts[y] = acc
    else:
        cols = range(w - 1, -1, -1) if dx > 0 else range(w)
        for x in cols:
            nx = x + dx
            if 0 <= nx < w:
                counts[:, x] = starts[:, nx] + counts[:, nx]
    return counts


def inside_outside_map(boundary: np.ndarray, min_votes: int = 5) -> np.ndarray:
    """Pixels inside the region enclosed by ``boundary`` by 8-ray parity voting.

    A pixel is inside when at least ``min_votes`` of its 8 rays cross an odd
    number of boundary runs; boundary pixels are always inside.
    """
    boundary = np.asarray(boundary).astype(bool)
    votes = np.zeros(boundary.shape, dtype=np.int32)
    for dy, dx in RAY_DIRECTIONS:
        votes += _ray_crossings(boundary, dy, dx) & 1
    return ((votes >= min_votes) | boundary).astype(np.uint8)


def distance_transform(mask: np.ndarray) -> np.ndarray:
    """Exact Euclidean distance from every pixel to the nearest mask pixel."""
    mask = np.asarray(mask).astype(bool)
    if not mask.any():
        raise ValueError("distance transform of an empty mask is undefined")
    return ndimage.distance_transform_edt(~mask)


def localize(flow: np.ndarray, lambda_m: float, lambda_theta: float, rho: float,
             threshold: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Boundary probability map and inside-outside mask for one flow field."""
    p = boundary_probability(boundary_strength(flow, lambda_m), direction_difference(flow, lambda_theta), rho)
    return p, inside_outside_map(binarize_boundary(p, threshold))
