"""Exact s-t max-flow / min-cut (Dinic's algorithm) on real-valued capacities."""
from __future__ import annotations

from collections import deque


class FlowNetwork:
    """Directed network with residual bookkeeping.

    Arcs are stored in pairs: arc ``e`` and its reverse ``e ^ 1``.
    """

    def __init__(self, n_nodes: int, source: int, sink: int):
        if source == sink:
            raise ValueError("source and sink must differ")
        if not (0 <= source < n_nodes and 0 <= sink < n_nodes):
            raise ValueError("terminal out of range")
        self.n = n_nodes
        self.source = source
        self.sink = sink
        self.adj = [[] for _ in range(n_nodes)]
        self.head = []
        self.residual = []
        self.capacity = []

    def add_edge(self, u: int, v: int, cap: float, rev_cap: float = 0.0) -> int:
        """Add ``u -> v`` with ``cap`` (and ``v -> u`` with ``rev_cap``); returns the arc id."""
        if cap < 0 or rev_cap < 0 or cap != cap or rev_cap != rev_cap:
            raise ValueError(f"capacities must be finite and >= 0, got {cap}, {rev_cap}")
        e = len(self.head)
        self.head += [v, u]
        self.residual += [float(cap), float(rev_cap)]
        self.capacity += [float(cap), float(rev_cap)]
        self.adj[u].append(e)
        self.adj[v].append(e + 1)
        return e

    def flow_on(self, e: int) -> float:
        """Net flow pushed along arc ``e``."""
        return self.capacity[e] - self.residual[e]

    def _levels(self, eps):
        level = [-1] * self.n
        level[self.source] = 0
        queue = deque([self.source])
        head, res, adj = self.head, self.residual, self.adj
        while queue:
            u = queue.popleft()
            for e in adj[u]:
                v = head[e]
                if level[v] < 0 and res[e] > eps:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level

    def _blocking_flow(self, level, eps) -> float:
        head, res, adj = self.head, self.residual, self.adj
        s, t = self.source, self.sink
        ptr = [0] * self.n
        total = 0.0
        while True:
            # Walk a level-increasing path from s with current-arc pointers.
            path = []
            u = s
            while u != t:
                arcs = adj[u]
                advanced = False
                while ptr[u] < len(arcs):
                    e = arcs[ptr[u]]
                    v = head[e]
                    if res[e] > eps and level[v] == level[u] + 1:
                        path.append(e)
                        u = v
                        advanced = True
                        break
                    ptr[u] += 1
                if not advanced:
                    if u == s:
                        return total
                    level[u] = -1  # dead end
                    e = path.pop()
                    u = head[e ^ 1]
                    ptr[u] += 1
            push = min(res[e] for e in path)
            for e in path:
                res[e] -= push
                res[e ^ 1] += push
            total += push

    def max_flow(self) -> tuple[float, set]:
        """Max-flow value and the source side of a minimum cut.

        The source side is the set of nodes reachable from the source in the
        final residual graph, so nodes cut off from both terminals land on the
        sink side.
        """
        eps = 1e-12 * (1.0 + max(self.capacity, default=0.0))
        value = 0.0
        while True:
            level = self._levels(eps)
            if level[self.sink] < 0:
                break
            value += self._blocking_flow(level, eps)
        level = self._levels(eps)
        return value, {v for v in range(self.n) if level[v] >= 0}


def cut_to_labels(source_side, node_of_superpixel) -> list[int]:
    """Foreground (1) for every superpixel whose node lies on the source side."""
    return [1 if node in source_side else 0 for node in node_of_superpixel]
