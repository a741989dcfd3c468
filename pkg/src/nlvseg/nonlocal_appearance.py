"""Long-range appearance fusion: match each superpixel against the previous F frames
and blend its appearance with the softmax-weighted matches."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .kdtree import KDTree


@dataclass(frozen=True)
class Match:
    frame_index: int
    superpixel_id: int
    distance: float
    appearance: np.ndarray


class AppearanceIndex:
    """Immutable nearest-neighbour index over the superpixel appearances of a frame window.

    One KD-tree is kept per frame so that per-frame nearest queries stay
    cheap; trees can be shared between overlapping windows.
    """

    def __init__(self, trees: Mapping[int, KDTree], exact: bool = True, max_leaf_visits: int = 64):
        if not trees:
            raise ValueError("appearance index needs a non-empty frame window")
        self._trees = dict(sorted(trees.items()))
        self.exact = exact
        self.max_leaf_visits = max_leaf_visits

    @classmethod
    def build(cls, appearances: Mapping[int, np.ndarray], exact: bool = True, max_leaf_visits: int = 64):
        """``appearances`` maps frame index to an ``(n, 6)`` array."""
        return cls({t: KDTree(a) for t, a in appearances.items() if len(a)}, exact, max_leaf_visits)

    @property
    def frames(self) -> list[int]:
        return list(self._trees)

    def _budget(self):
        return None if self.exact else self.max_leaf_visits

    def nearest_in_frame(self, a, frame_index: int) -> Match:
        tree = self._trees[frame_index]
        j, d = tree.query(a, self._budget())
        return Match(frame_index, j, d, tree.points[j])

    def nearest(self, a) -> Match:
        """Nearest entry over the whole window (earliest frame wins ties)."""
        return min((self.nearest_in_frame(a, t) for t in self._trees), key=lambda m: (m.distance, m.frame_index))


def window_frames(t: int, F: int, first: int = 0) -> range:
    return range(max(first, t - F), t)


def query_counterparts(a, index: AppearanceIndex | None, t: int, F: int) -> list[Match]:
    """The appearance-nearest superpixel of each of the frames t-F .. t-1 present in the index."""
    if index is None:
        return []
    return [index.nearest_in_frame(a, tp) for tp in window_frames(t, F) if tp in index.frames]


def fusion_weights(a, matches: Sequence[Match]) -> np.ndarray:
    if not matches:
        raise ValueError("fusion weights need at least one match")
    a = np.asarray(a, dtype=np.float64)
    d = np.array([np.linalg.norm(a - m.appearance) for m in matches])
    # shift by the minimum distance for numerical stability; the softmax is unchanged
    e = np.exp(-(d - d.min()))
    return e / e.sum()


def fuse_appearance(matches: Sequence[Match], weights) -> np.ndarray:
    stacked = np.stack([m.appearance for m in matches])
    return np.asarray(weights, dtype=np.float64) @ stacked


def update_appearance(a, a_bar, beta: float) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a_bar is None:
        return a.copy()
    return beta * a + (1.0 - beta) * np.asarray(a_bar, dtype=np.float64)


def update_sequence(appearances: Sequence[np.ndarray], F: int, beta: float,
                    exact: bool = True, max_leaf_visits: int = 64) -> list[np.ndarray]:
    """Updated appearances for every frame of a video.

    All matches are drawn from the original appearances, so the result does
    not depend on the order in which frames are processed.
    """
    trees = {t: KDTree(a) for t, a in enumerate(appearances) if len(a)}
    updated = []
    for t, frame_app in enumerate(appearances):
        window = {tp: trees[tp] for tp in window_frames(t, F) if tp in trees}
        index = AppearanceIndex(window, exact, max_leaf_visits) if window else None
        out = np.empty_like(np.asarray(frame_app, dtype=np.float64))
        for i, a in enumerate(frame_app):
            matches = query_counterparts(a, index, t, F)
            if matches:
                a_bar = fuse_appearance(matches, fusion_weights(a, matches))
            else:
                a_bar = None
            out[i] = update_appearance(a, a_bar, beta)
        updated.append(out)
    return updated
