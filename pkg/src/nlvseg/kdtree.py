"""A small KD-tree with exact and bounded best-bin-first nearest-neighbour queries."""
from __future__ import annotations

import heapq

import numpy as np


class KDTree:
    """KD-tree over the rows of ``points``.

    Nodes are stored in flat arrays. Internal nodes split on the dimension of
    largest spread at the median; leaves hold up to ``leaf_size`` point ids.
    """

    def __init__(self, points, leaf_size: int = 8):
        points = np.asarray(points, dtype=np.float64)
        if points.ndim != 2 or len(points) == 0:
            raise ValueError("KDTree needs a non-empty (n, d) point array")
        self.points = points
        self.leaf_size = leaf_size
        self._dim = []
        self._split = []
        self._left = []
        self._right = []
        self._leaf = []
        self._build(np.arange(len(points)))

    def __len__(self):
        return len(self.points)

    def _new_node(self):
        self._dim.append(-1)
        self._split.append(0.0)
        self._left.append(-1)
        self._right.append(-1)
        self._leaf.append(None)
        return len(self._dim) - 1

    def _build(self, ids):
        node = self._new_node()
        pts = self.points[ids]
        spread = pts.max(axis=0) - pts.min(axis=0)
        if len(ids) <= self.leaf_size or not np.any(spread > 0):
            self._leaf[node] = ids
            return node
        dim = int(np.argmax(spread))
        order = np.argsort(pts[:, dim], kind="stable")
        mid = len(ids) // 2
        self._dim[node] = dim
        self._split[node] = float(pts[order[mid], dim])
        left = self._build(ids[order[:mid]])
        right = self._build(ids[order[mid:]])
        self._left[node] = left
        self._right[node] = right
        return node

    def _scan_leaf(self, node, q, best):
        ids = self._leaf[node]
        d2 = np.sum((self.points[ids] - q) ** 2, axis=1)
        m = float(d2.min())
        # ties resolve to the lowest point id, matching a linear scan
        return min(best, (m, int(ids[d2 == m].min())))

    def query(self, q, max_leaf_visits: int | None = None) -> tuple[int, float]:
        """Nearest point id and its Euclidean distance.

        With ``max_leaf_visits=None`` the search is exact. Otherwise bins are
        explored best-first by lower-bound distance and the search stops
        after that many leaves.
        """
        q = np.asarray(q, dtype=np.float64)
        best = (np.inf, -1)
        visits = 0
        heap = [(0.0, 0)]
        while heap:
            bound, node = heapq.heappop(heap)
            if bound > best[0]:
                break
            while self._leaf[node] is None:
                dim = self._dim[node]
                diff = q[dim] - self._split[node]
                near, far = (self._left[node], self._right[node]) if diff < 0 else (self._right[node], self._left[node])
                far_bound = max(bound, diff * diff)
                if far_bound <= best[0]:
                    heapq.heappush(heap, (far_bound, far))
                node = near
            best = self._scan_leaf(node, q, best)
            visits += 1
            if max_leaf_visits is not None and visits >= max_leaf_visits:
                break
        return best[1], float(np.sqrt(best[0]))


def linear_scan(points, q) -> tuple[int, float]:
    d = np.sqrt(np.sum((np.asarray(points, dtype=np.float64) - np.asarray(q, dtype=np.float64)) ** 2, axis=1))
    j = int(np.argmin(d))
    return j, float(d[j])
