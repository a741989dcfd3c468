"""Unary and pairwise potentials of the superpixel MRF, its energy, and the s-t graph."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gmm import GmmModel
from .localization import distance_transform
from .maxflow import FlowNetwork, cut_to_labels

COST_CAP = 1e6


def location_costs(label_map: np.ndarray, mask: np.ndarray, sigma_l: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-region location costs from the inside-outside mask.

    The foreground cost of a region is the mean over its pixels of
    ``1 - exp(-d / sigma_l)``, ``d`` being the distance to the mask; the
    background cost uses the distance to the mask complement instead.
    """
    mask = np.asarray(mask).astype(bool)
    n = int(label_map.max()) + 1
    flat = label_map.ravel()
    counts = np.bincount(flat, minlength=n)

    def region_cost(target):
        if target.all():
            return np.zeros(n)
        if not target.any():
            return np.ones(n)
        cost = 1.0 - np.exp(-distance_transform(target) / sigma_l)
        return np.bincount(flat, cost.ravel(), n) / counts

    return region_cost(mask), region_cost(~mask)


def location_cost(pixels, dt_in: np.ndarray, dt_out: np.ndarray, sigma_l: float) -> tuple[float, float]:
    """Location costs of one superpixel given its member pixel coordinates ``(ys, xs)``.

    ``dt_in`` is the distance to the mask's foreground, ``dt_out`` the
    distance to its complement.
    """
    ys, xs = pixels
    fg = float(np.mean(1.0 - np.exp(-dt_in[ys, xs] / sigma_l)))
    bg = float(np.mean(1.0 - np.exp(-dt_out[ys, xs] / sigma_l)))
    return fg, bg


def unary_potentials(appearances: np.ndarray, gmm_fg: GmmModel, gmm_bg: GmmModel,
                     loc_fg: np.ndarray, loc_bg: np.ndarray, eta: float) -> tuple[np.ndarray, np.ndarray]:
    """Colour negative log-likelihood plus weighted location cost, for both labels."""
    appearances = np.atleast_2d(appearances)
    cost_fg = gmm_fg.neg_log_likelihood(appearances) + eta * np.asarray(loc_fg)
    cost_bg = gmm_bg.neg_log_likelihood(appearances) + eta * np.asarray(loc_bg)
    return np.minimum(cost_fg, COST_CAP), np.minimum(cost_bg, COST_CAP)


def spatial_weight(a_i, a_j, p_i, p_j, alpha: float) -> float:
    """exp(-alpha |a_i - a_j|) divided by the centroid distance (clamped to >= 1 px)."""
    da = np.linalg.norm(np.asarray(a_i, dtype=np.float64) - np.asarray(a_j, dtype=np.float64))
    dp = np.hypot(p_i[0] - p_j[0], p_i[1] - p_j[1])
    return float(np.exp(-alpha * da) / max(dp, 1.0))


def temporal_weight(a_i, a_j, alpha: float, psi: float) -> float:
    da = np.linalg.norm(np.asarray(a_i, dtype=np.float64) - np.asarray(a_j, dtype=np.float64))
    return float(np.exp(-alpha * da) * psi)


@dataclass
class EnergyTerms:
    unary: float
    spatial: float
    temporal: float

    @property
    def total(self) -> float:
        return self.unary + self.spatial + self.temporal


def _edge_arrays(edges):
    if len(edges) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0)
    arr = np.asarray(edges, dtype=np.float64)
    return arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64), arr[:, 2]


def energy_terms(labels, cost_fg, cost_bg, spatial_edges, temporal_edges, gamma1: float, gamma2: float) -> EnergyTerms:
    """Energy of a labelling; edges are ``(i, j, weight)`` triples over global node ids."""
    labels = np.asarray(labels)
    unary = float(np.sum(np.where(labels == 1, cost_fg, cost_bg)))
    parts = []
    for edges, gamma in ((spatial_edges, gamma1), (temporal_edges, gamma2)):
        i, j, w = _edge_arrays(edges)
        parts.append(gamma * float(np.sum(w[labels[i] != labels[j]])))
    return EnergyTerms(unary, parts[0], parts[1])


def total_energy(labels, cost_fg, cost_bg, spatial_edges, temporal_edges, gamma1: float, gamma2: float) -> float:
    return energy_terms(labels, cost_fg, cost_bg, spatial_edges, temporal_edges, gamma1, gamma2).total


@dataclass
class StGraph:
    network: FlowNetwork
    constant: float  # sum over nodes of min(cost_fg, cost_bg)
    n_nodes: int

    def solve(self) -> tuple[np.ndarray, float]:
        """Minimum-energy labelling (source side = foreground) and its energy."""
        value, source_side = self.network.max_flow()
        labels = np.array(cut_to_labels(source_side, range(self.n_nodes)), dtype=np.int64)
        return labels, value + self.constant


def build_st_graph(cost_fg, cost_bg, spatial_edges, temporal_edges, gamma1: float, gamma2: float) -> StGraph:
    cost_fg = np.asarray(cost_fg, dtype=np.float64)
    cost_bg = np.asarray(cost_bg, dtype=np.float64)
    n = len(cost_fg)
    source, sink = n, n + 1
    net = FlowNetwork(n + 2, source, sink)
    base = np.minimum(cost_fg, cost_bg)
    for v in range(n):
        # cutting s->v puts v on the sink (background) side; v->t is cut when v is foreground
        bg, fg = cost_bg[v] - base[v], cost_fg[v] - base[v]
        if bg > 0:
            net.add_edge(source, v, bg)
        if fg > 0:
            net.add_edge(v, sink, fg)
    for edges, gamma in ((spatial_edges, gamma1), (temporal_edges, gamma2)):
        for i, j, w in edges:
            cap = gamma * w
            if cap < 0:
                raise ValueError(f"negative pairwise capacity {cap} on edge ({i}, {j})")
            if cap > 0:
                net.add_edge(int(i), int(j), cap, cap)
    return StGraph(net, float(base.sum()), n)
