"""SLIC oversegmentation, superpixel feature records, spatial and flow-based temporal neighbours."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from skimage.color import rgb2hsv, rgb2lab

_FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)


@dataclass
class Superpixel:
    appearance: np.ndarray  # mean (H, S, V, R, G, B), each in [0, 1]
    centroid: tuple[float, float]  # (x, y) in px
    pixel_count: int
    frame_index: int
    label: int = 0


@dataclass(frozen=True)
class TemporalLink:
    source: int  # region id in frame t-1
    target: int  # region id in frame t
    psi: float


def _seed_grid(height: int, width: int, k: int):
    step = np.sqrt(height * width / k)
    ny = max(1, int(round(height / step)))
    nx = max(1, int(round(width / step)))
    ys = (np.arange(ny) + 0.5) * height / ny
    xs = (np.arange(nx) + 0.5) * width / nx
    gy, gx = np.meshgrid(ys, xs, indexing="ij")
    return gy.ravel(), gx.ravel(), step


def _perturb_to_low_gradient(lab, ys, xs):
    """Move each seed to the lowest-gradient pixel of its 3x3 neighbourhood."""
    h, w = lab.shape[:2]
    grad = np.zeros((h, w))
    for c in range(3):
        gy, gx = np.gradient(lab[..., c])
        grad += gx ** 2 + gy ** 2
    out_y, out_x = ys.copy(), xs.copy()
    for i, (y, x) in enumerate(zip(ys, xs)):
        cy, cx = int(min(h - 1, y)), int(min(w - 1, x))
        best = grad[cy, cx]
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                yy, xx = cy + dy, cx + dx
                if 0 <= yy < h and 0 <= xx < w and grad[yy, xx] < best - 1e-12:
                    best = grad[yy, xx]
                    out_y[i], out_x[i] = yy, xx
    return out_y, out_x


def _enforce_connectivity(labels: np.ndarray, lab: np.ndarray, min_size: int) -> np.ndarray:
    """Merge disconnected fragments and tiny regions into the most similar neighbour."""
    h, w = labels.shape
    # Split every label into 4-connected components.
    comp = np.zeros((h, w), dtype=np.int64)
    n_comp = 0
    for lbl in np.unique(labels):
        cc, n = ndimage.label(labels == lbl, structure=_FOUR_CONNECTED)
        comp[cc > 0] = cc[cc > 0] + n_comp
        n_comp += n
    comp -= 1
    sizes = np.bincount(comp.ravel(), minlength=n_comp)
    owner = np.zeros(n_comp, dtype=np.int64)
    owner[comp.ravel()] = labels.ravel()
    # Keep the largest fragment of each label, if it is big enough.
    keep = np.zeros(n_comp, dtype=bool)
    for lbl in np.unique(owner):
        members = np.flatnonzero(owner == lbl)
        biggest = members[np.argmax(sizes[members])]
        keep[biggest] = sizes[biggest] >= min_size
    if not keep.any():
        keep[np.argmax(sizes)] = True

    colour_sum = np.stack([np.bincount(comp.ravel(), lab[..., c].ravel(), n_comp) for c in range(3)], axis=1)
    parent = np.arange(n_comp)

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    # Adjacent component pairs.
    pairs = set()
    for a, b in ((comp[:, :-1], comp[:, 1:]), (comp[:-1, :], comp[1:, :])):
        diff = a != b
        pairs.update(zip(a[diff].tolist(), b[diff].tolist()))
    neighbours = [set() for _ in range(n_comp)]
    for a, b in pairs:
        neighbours[a].add(b)
        neighbours[b].add(a)

    size = sizes.astype(np.float64).copy()
    csum = colour_sum.copy()
    settled = keep.copy()
    # Orphans are absorbed smallest-first; each absorption reaches a settled region eventually.
    pending = sorted(np.flatnonzero(~keep).tolist(), key=lambda c: (sizes[c], c))
    while pending:
        progressed = False
        remaining = []
        for c in pending:
            root_c = find(c)
            cand = {find(n) for n in neighbours[c]} - {root_c}
            cand = [r for r in cand if settled[r]]
            if not cand:
                remaining.append(c)
                continue
            mean_c = csum[root_c] / size[root_c]
            best = min(cand, key=lambda r: (np.sum((csum[r] / size[r] - mean_c) ** 2), r))
            parent[root_c] = best
            size[best] += size[root_c]
            csum[best] += csum[root_c]
            progressed = True
        if not progressed:
            # Isolated orphan clusters: settle the largest and continue.
            c = max(remaining, key=lambda c: (sizes[c], -c))
            settled[find(c)] = True
            remaining.remove(c)
        pending = remaining
    roots = np.array([find(c) for c in range(n_comp)])
    _, dense = np.unique(roots, return_inverse=True)
    return dense[comp]


def slic_segment(frame: np.ndarray, k: int, compactness: float = 10.0, iterations: int = 10) -> np.ndarray:
    """SLIC superpixels as a dense ``(H, W)`` label map with 4-connected regions.

    Colour distances are measured in CIELAB computed from the [0, 1] RGB input,
    so ``compactness`` keeps its usual SLIC meaning.
    """
    h, w = frame.shape[:2]
    if k < 4 or k > h * w / 16:
        raise ValueError(f"k={k} out of range [4, {h * w // 16}] for a {w}x{h} frame")
    lab = rgb2lab(np.clip(frame, 0.0, 1.0))
    ys, xs, step = _seed_grid(h, w, k)
    ys, xs = _perturb_to_low_gradient(lab, ys, xs)
    centers = np.column_stack([ys, xs, lab[np.minimum(ys.astype(int), h - 1), np.minimum(xs.astype(int), w - 1)]])
    yy, xx = np.mgrid[0:h, 0:w]
    weight = (compactness / step) ** 2
    radius = int(np.ceil(step))
    labels = np.zeros((h, w), dtype=np.int64)
    for _ in range(iterations):
        dist = np.full((h, w), np.inf)
        for i, (cy, cx, l, a, b) in enumerate(centers):
            y0, y1 = max(0, int(cy) - radius), min(h, int(cy) + radius + 1)
            x0, x1 = max(0, int(cx) - radius), min(w, int(cx) + radius + 1)
            win = lab[y0:y1, x0:x1]
            dc = (win[..., 0] - l) ** 2 + (win[..., 1] - a) ** 2 + (win[..., 2] - b) ** 2
            ds = (yy[y0:y1, x0:x1] - cy) ** 2 + (xx[y0:y1, x0:x1] - cx) ** 2
            d = dc + weight * ds
            sub = dist[y0:y1, x0:x1]
            better = d < sub
            sub[better] = d[better]
            labels[y0:y1, x0:x1][better] = i
        n = len(centers)
        flat = labels.ravel()
        counts = np.bincount(flat, minlength=n).astype(np.float64)
        nonempty = counts > 0
        sums = np.stack([np.bincount(flat, yy.ravel(), n), np.bincount(flat, xx.ravel(), n)]
                        + [np.bincount(flat, lab[..., c].ravel(), n) for c in range(3)], axis=1)
        centers[nonempty] = sums[nonempty] / counts[nonempty, None]
    return _enforce_connectivity(labels, lab, min_size=max(1, int(step * step / 4)))


def extract_superpixels(frame: np.ndarray, label_map: np.ndarray, frame_index: int) -> list[Superpixel]:
    """Mean HSV+RGB appearance and centroid of every region, labels set to 0."""
    h, w = label_map.shape
    n = int(label_map.max()) + 1
    flat = label_map.ravel()
    counts = np.bincount(flat, minlength=n)
    if np.any(counts == 0):
        raise ValueError("label map ids are not dense")
    features = np.concatenate([rgb2hsv(np.clip(frame, 0.0, 1.0)), frame], axis=-1).reshape(-1, 6)
    means = np.stack([np.bincount(flat, features[:, c], n) for c in range(6)], axis=1) / counts[:, None]
    yy, xx = np.mgrid[0:h, 0:w]
    cx = np.bincount(flat, xx.ravel(), n) / counts
    cy = np.bincount(flat, yy.ravel(), n) / counts
    return [Superpixel(np.clip(means[i], 0.0, 1.0), (float(cx[i]), float(cy[i])), int(counts[i]), frame_index)
            for i in range(n)]


def spatial_adjacency(label_map: np.ndarray) -> list[tuple[int, int]]:
    """Sorted undirected (i, j), i < j, for regions sharing a 4-adjacent pixel pair."""
    edges = set()
    for a, b in ((label_map[:, :-1], label_map[:, 1:]), (label_map[:-1, :], label_map[1:, :])):
        diff = a != b
        lo = np.minimum(a[diff], b[diff])
        hi = np.maximum(a[diff], b[diff])
        edges.update(zip(lo.tolist(), hi.tolist()))
    return sorted(edges)


def temporal_links(labels_prev: np.ndarray, labels_cur: np.ndarray, flow: np.ndarray) -> list[TemporalLink]:
    """Flow-overlap links from regions of frame t-1 to regions of frame t.

    Every pixel of frame t-1 is moved by its flow vector, rounded to the
    nearest pixel and clamped to the frame; ``psi`` is the fraction of a
    source region's pixels landing in each target region.
    """
    if labels_prev.shape != labels_cur.shape or flow.shape[:2] != labels_prev.shape:
        raise ValueError("label maps and flow must share dimensions")
    h, w = labels_prev.shape
    yy, xx = np.mgrid[0:h, 0:w]
    tx = np.clip(np.rint(xx + flow[..., 0]), 0, w - 1).astype(np.int64)
    ty = np.clip(np.rint(yy + flow[..., 1]), 0, h - 1).astype(np.int64)
    src = labels_prev.ravel()
    dst = labels_cur[ty, tx].ravel()
    n_cur = int(labels_cur.max()) + 1
    pair, count = np.unique(src * n_cur + dst, return_counts=True)
    totals = np.bincount(src)
    return [TemporalLink(int(p // n_cur), int(p % n_cur), float(c / totals[p // n_cur]))
            for p, c in zip(pair, count)]
