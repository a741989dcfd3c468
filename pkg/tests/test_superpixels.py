import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import ndimage

from nlvseg.superpixels import extract_superpixels, slic_segment, spatial_adjacency, temporal_links

FOUR = ndimage.generate_binary_structure(2, 1)


def assert_partition(labels, shape):
    assert labels.shape == shape
    n = labels.max() + 1
    counts = np.bincount(labels.ravel(), minlength=n)
    assert counts.sum() == shape[0] * shape[1]
    assert np.all(counts > 0), "ids must be dense"
    for i in range(n):
        _, n_cc = ndimage.label(labels == i, structure=FOUR)
        assert n_cc == 1, f"region {i} is not 4-connected"


def test_uniform_frame_gives_seed_grid():
    frame = np.full((64, 64, 3), 0.4)
    labels = slic_segment(frame, 16)
    assert labels.max() + 1 == 16
    assert_partition(labels, (64, 64))
    grid = {(x, y) for x in (8, 24, 40, 56) for y in (8, 24, 40, 56)}
    for sp in extract_superpixels(frame, labels, 0):
        assert min(np.hypot(sp.centroid[0] - gx, sp.centroid[1] - gy) for gx, gy in grid) <= 2.0


def test_two_tone_boundary_is_respected():
    frame = np.zeros((64, 64, 3))
    frame[:, :29] = (1, 0, 0)
    frame[:, 29:] = (0, 0, 1)
    labels = slic_segment(frame, 16)
    assert_partition(labels, (64, 64))
    for i in range(labels.max() + 1):
        xs = np.nonzero(labels == i)[1]
        left, right = np.sum(xs < 29), np.sum(xs >= 29)
        # a region may poke at most 1 px across the colour edge
        if left and right:
            assert xs.min() >= 28 or xs.max() <= 29


def test_textured_frame_partition_and_count(rng):
    frame = ndimage.gaussian_filter(rng.random((60, 80, 3)), (2, 2, 0))
    frame = (frame - frame.min()) / np.ptp(frame)
    for k in (4, 20, 100, 300):
        labels = slic_segment(frame, k)
        assert_partition(labels, (60, 80))
        assert k / 2 <= labels.max() + 1 <= 2 * k


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(4, 40), st.floats(1, 40))
def test_slic_always_partitions(seed, k, compactness):
    frame = np.random.default_rng(seed).random((32, 40, 3))
    labels = slic_segment(frame, k, compactness, iterations=3)
    assert_partition(labels, (32, 40))


def test_k_out_of_range():
    with pytest.raises(ValueError):
        slic_segment(np.zeros((16, 16, 3)), 3)
    with pytest.raises(ValueError):
        slic_segment(np.zeros((16, 16, 3)), 17)


def test_slic_is_deterministic(rng):
    frame = rng.random((32, 32, 3))
    np.testing.assert_array_equal(slic_segment(frame, 20), slic_segment(frame, 20))


def test_pure_red_appearance():
    frame = np.zeros((4, 4, 3))
    frame[...] = (1, 0, 0)
    (sp,) = extract_superpixels(frame, np.zeros((4, 4), int), 3)
    np.testing.assert_allclose(sp.appearance, [0, 1, 1, 1, 0, 0])
    assert sp.label == 0 and sp.frame_index == 3 and sp.pixel_count == 16


def test_single_pixel_centroid():
    labels = np.zeros((10, 10), int)
    labels[7, 3] = 1
    sps = extract_superpixels(np.zeros((10, 10, 3)), labels, 0)
    assert sps[1].centroid == (3.0, 7.0)
    assert sps[1].pixel_count == 1


def test_red_blue_mean_is_mean_of_pixel_hsv():
    frame = np.array([[[1.0, 0, 0], [0, 0, 1.0]]])
    (sp,) = extract_superpixels(frame, np.zeros((1, 2), int), 0)
    np.testing.assert_allclose(sp.appearance, [(0 + 240 / 360) / 2, 1, 1, 0.5, 0, 0.5])


def test_appearance_inside_member_hull(rng):
    frame = rng.random((12, 12, 3))
    labels = slic_segment(frame, 6)
    from skimage.color import rgb2hsv
    feats = np.concatenate([rgb2hsv(frame), frame], axis=-1)
    for i, sp in enumerate(extract_superpixels(frame, labels, 0)):
        members = feats[labels == i]
        assert np.all(sp.appearance >= members.min(axis=0) - 1e-12)
        assert np.all(sp.appearance <= members.max(axis=0) + 1e-12)


def test_adjacency_cases():
    split = np.zeros((4, 6), int)
    split[:, 3:] = 1
    assert spatial_adjacency(split) == [(0, 1)]
    assert spatial_adjacency(np.zeros((5, 5), int)) == []
    grid = np.repeat(np.repeat(np.arange(16).reshape(4, 4), 3, axis=0), 3, axis=1)
    edges = spatial_adjacency(grid)
    # rook adjacency on a 4x4 grid: 4 rows * 3 + 4 columns * 3
    assert len(edges) == 24
    assert all(i < j for i, j in edges) and len(set(edges)) == 24


def test_zero_flow_links_regions_to_themselves():
    labels = np.repeat(np.arange(4), 4).reshape(4, 4)
    links = temporal_links(labels, labels, np.zeros((4, 4, 2)))
    assert {(l.source, l.target, l.psi) for l in links} == {(i, i, 1.0) for i in range(4)}


def test_shifted_region_links_fully():
    prev = np.zeros((6, 6), int)
    prev[1:3, 1:3] = 1
    cur = np.zeros((6, 6), int)
    cur[1:3, 3:5] = 1
    flow = np.zeros((6, 6, 2))
    flow[1:3, 1:3, 0] = 2
    links = [l for l in temporal_links(prev, cur, flow) if l.source == 1]
    assert [(l.target, l.psi) for l in links] == [(1, 1.0)]


def test_half_split_gives_half_psi():
    prev = np.zeros((4, 4), int)
    cur = np.zeros((4, 4), int)
    cur[:, 2:] = 1
    # zero flow: the left half of region 0 stays in region 0, the right half lands in region 1
    flow = np.zeros((4, 4, 2))
    links = {(l.target): l.psi for l in temporal_links(prev, cur, flow)}
    assert links == {0: 0.5, 1: 0.5}


def test_displacement_rounds_and_clamps():
    prev = np.zeros((3, 3), int)
    cur = np.arange(9).reshape(3, 3)
    flow = np.full((3, 3, 2), 10.0)  # everything lands on the bottom-right pixel
    (link,) = temporal_links(prev, cur, flow)
    assert (link.target, link.psi) == (8, 1.0)


def test_psi_sums_to_one(rng):
    for _ in range(5):
        prev = slic_segment(rng.random((24, 24, 3)), 12, iterations=2)
        cur = slic_segment(rng.random((24, 24, 3)), 12, iterations=2)
        flow = rng.normal(0, 3, (24, 24, 2))
        links = temporal_links(prev, cur, flow)
        sums = np.zeros(prev.max() + 1)
        for l in links:
            assert 0 < l.psi <= 1
            sums[l.source] += l.psi
        np.testing.assert_allclose(sums, 1.0, atol=1e-9)
