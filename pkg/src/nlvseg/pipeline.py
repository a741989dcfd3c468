"""End-to-end unsupervised segmentation of the moving object in a frame sequence."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import energy
from .gmm import fit_gmm
from .io import DataError
from .localization import localize
from .nonlocal_appearance import update_sequence
from .params import PipelineParams
from .superpixels import extract_superpixels, slic_segment, spatial_adjacency, temporal_links

log = logging.getLogger(__name__)

EARLY_STOP_FRACTION = 0.001


class NoMotionEvidence(DataError):
    """The motion cues leave no usable foreground (or background) to start from."""


@dataclass
class IterationRecord:
    iteration: int
    energy_before: float
    unary: float
    spatial: float
    temporal: float
    total: float
    labels_changed: int


@dataclass
class VideoSegmentation:
    masks: list
    trace: list
    params: PipelineParams
    boundary_maps: list = field(default_factory=list)
    inside_maps: list = field(default_factory=list)
    label_maps: list = field(default_factory=list)
    labels: np.ndarray | None = None


def superpixel_labels_to_mask(label_map: np.ndarray, labels) -> np.ndarray:
    labels = np.asarray(labels)
    n = int(label_map.max()) + 1
    if len(labels) < n:
        raise ValueError(f"labels cover {len(labels)} regions, label map has {n}")
    return labels[label_map].astype(np.uint8)


@dataclass
class _VideoGraph:
    """Superpixels of all frames flattened into global node ids."""

    label_maps: list
    offsets: np.ndarray  # first node id of each frame
    appearances: np.ndarray  # updated appearances, (N, 6)
    pixel_counts: np.ndarray
    spatial_edges: list
    temporal_edges: list

    def frame_slice(self, t):
        return slice(self.offsets[t], self.offsets[t + 1])


def _build_video_graph(frames, flows, params: PipelineParams) -> _VideoGraph:
    h, w = frames[0].shape[:2]
    k = params.superpixel_count(w, h)
    label_maps, records = [], []
    for t, frame in enumerate(frames):
        lm = slic_segment(frame, k, params.slic_compactness, params.slic_iterations)
        label_maps.append(lm)
        records.append(extract_superpixels(frame, lm, t))
    offsets = np.cumsum([0] + [len(r) for r in records])
    original = [np.array([sp.appearance for sp in r]) for r in records]
    updated = update_sequence(original, params.F, params.beta, params.ann_exact, params.ann_max_leaf_visits)
    centroids = [[sp.centroid for sp in r] for r in records]

    spatial = []
    for t, lm in enumerate(label_maps):
        o = offsets[t]
        for i, j in spatial_adjacency(lm):
            wgt = energy.spatial_weight(updated[t][i], updated[t][j], centroids[t][i], centroids[t][j], params.alpha)
            spatial.append((o + i, o + j, wgt))
    temporal = []
    for t in range(1, len(frames)):
        for link in temporal_links(label_maps[t - 1], label_maps[t], flows[t - 1]):
            wgt = energy.temporal_weight(updated[t][link.target], updated[t - 1][link.source], params.alpha, link.psi)
            temporal.append((offsets[t] + link.target, offsets[t - 1] + link.source, wgt))
    return _VideoGraph(label_maps, offsets, np.concatenate(updated),
                       np.array([sp.pixel_count for r in records for sp in r]), spatial, temporal)


def _initial_labels(graph: _VideoGraph, inside_maps) -> np.ndarray:
    labels = []
    for lm, m in zip(graph.label_maps, inside_maps):
        n = int(lm.max()) + 1
        inside = np.bincount(lm.ravel(), m.ravel().astype(np.float64), n)
        labels.append((inside / np.bincount(lm.ravel(), minlength=n) > 0.5).astype(np.int64))
    return np.concatenate(labels)


def _location_costs(graph: _VideoGraph, inside_maps, sigma_l):
    fg, bg = [], []
    for t, lm in enumerate(graph.label_maps):
        prior = inside_maps[t - 1] if t > 0 else inside_maps[0]
        f, b = energy.location_costs(lm, prior, sigma_l)
        fg.append(f)
        bg.append(b)
    return np.concatenate(fg), np.concatenate(bg)


def _fit_models(graph: _VideoGraph, labels, params: PipelineParams, iteration: int):
    models = []
    for value in (1, 0):
        sel = labels == value
        x = graph.appearances[sel]
        k = min(params.gmm_components, len(x))
        models.append(fit_gmm(x, k, seed=params.random_seed + iteration, sample_weight=graph.pixel_counts[sel]))
    return models


def segment_video(frames, flows, params: PipelineParams = PipelineParams()) -> VideoSegmentation:
    if len(frames) < 2:
        raise DataError(f"need >= 2 frames, got {len(frames)}")
    if len(flows) != len(frames) - 1:
        raise DataError(f"expected {len(frames) - 1} flow fields, got {len(flows)}")
    h, w = frames[0].shape[:2]

    # Motion boundaries and inside-outside maps; the last frame reuses the last flow.
    boundary_maps, inside_maps = [], []
    for t in range(len(frames)):
        p, m = localize(flows[min(t, len(flows) - 1)], params.lambda_m, params.lambda_theta,
                        params.rho, params.boundary_threshold)
        boundary_maps.append(p)
        inside_maps.append(m)

    graph = _build_video_graph(frames, flows, params)
    init = _initial_labels(graph, inside_maps)
    if init.all() or not init.any():
        raise NoMotionEvidence("no motion evidence: the inside-outside maps give a single-label initialisation")

    loc_fg, loc_bg = _location_costs(graph, inside_maps, params.sigma_l_scale * max(w, h))
    labels = init.copy()
    trace = []
    for it in range(params.outer_iterations):
        gmm_fg, gmm_bg = _fit_models(graph, labels, params, it)
        cost_fg, cost_bg = energy.unary_potentials(graph.appearances, gmm_fg, gmm_bg, loc_fg, loc_bg, params.eta)
        before = energy.total_energy(labels, cost_fg, cost_bg, graph.spatial_edges, graph.temporal_edges,
                                     params.gamma1, params.gamma2)
        st = energy.build_st_graph(cost_fg, cost_bg, graph.spatial_edges, graph.temporal_edges,
                                   params.gamma1, params.gamma2)
        new_labels, _ = st.solve()
        terms = energy.energy_terms(new_labels, cost_fg, cost_bg, graph.spatial_edges, graph.temporal_edges,
                                    params.gamma1, params.gamma2)
        changed = int(np.count_nonzero(new_labels != labels))
        trace.append(IterationRecord(it + 1, before, terms.unary, terms.spatial, terms.temporal, terms.total, changed))
        log.info("iteration %d: E %.4f -> %.4f, %d labels changed", it + 1, before, terms.total, changed)
        if new_labels.all() or not new_labels.any():
            log.warning("iteration %d collapsed to a single label; reverting to the initial labelling", it + 1)
            labels = init.copy()
            break
        labels = new_labels
        if changed < EARLY_STOP_FRACTION * len(labels):
            break

    masks = [superpixel_labels_to_mask(lm, labels[graph.frame_slice(t)]) for t, lm in enumerate(graph.label_maps)]
    return VideoSegmentation(masks, trace, params, boundary_maps, inside_maps, graph.label_maps, labels)
