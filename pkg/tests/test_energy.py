import math

import numpy as np
import pytest

from nlvseg import energy
from nlvseg.gmm import GmmModel
from nlvseg.localization import distance_transform
from oracles import brute_force_energy


def test_location_cost_inside_and_far_outside():
    mask = np.zeros((40, 40), np.uint8)
    mask[:10, :10] = 1
    labels = np.zeros((40, 40), int)
    labels[2:5, 2:5] = 1
    labels[35:, 35:] = 2
    fg, bg = energy.location_costs(labels, mask, sigma_l=1.0)
    assert fg[1] == 0.0
    assert fg[2] == pytest.approx(1.0, abs=1e-9) and bg[2] == 0.0


def test_location_cost_straddling_border():
    mask = np.zeros((3, 6), np.uint8)
    mask[:, :3] = 1
    labels = np.zeros((3, 6), int)
    labels[1, 2:4] = 1  # one pixel inside (distance 0), one outside (distance 1)
    fg, bg = energy.location_costs(labels, mask, sigma_l=1.0)
    assert fg[1] == pytest.approx((0 + 1 - math.exp(-1)) / 2, abs=1e-12)
    assert bg[1] == pytest.approx((1 - math.exp(-1) + 0) / 2, abs=1e-12)
    ys, xs = np.nonzero(labels == 1)
    single = energy.location_cost((ys, xs), distance_transform(mask), distance_transform(1 - mask), 1.0)
    assert single == pytest.approx((fg[1], bg[1]))


def test_location_cost_degenerate_masks():
    labels = np.zeros((4, 4), int)
    labels[:, 2:] = 1
    fg, bg = energy.location_costs(labels, np.zeros((4, 4)), 1.0)
    np.testing.assert_array_equal(fg, 1.0)
    np.testing.assert_array_equal(bg, 0.0)
    fg, bg = energy.location_costs(labels, np.ones((4, 4)), 1.0)
    np.testing.assert_array_equal(fg, 0.0)
    np.testing.assert_array_equal(bg, 1.0)


def unit_gmm(mean):
    return GmmModel(np.ones(1), np.asarray(mean, float)[None], np.eye(6)[None] * 0.05)


def test_unary_is_sum_of_parts(rng):
    a = rng.random((5, 6))
    g_fg, g_bg = unit_gmm(np.full(6, 0.8)), unit_gmm(np.full(6, 0.2))
    loc_fg, loc_bg = rng.random(5), rng.random(5)
    fg, bg = energy.unary_potentials(a, g_fg, g_bg, loc_fg, loc_bg, eta=1.7)
    np.testing.assert_allclose(fg, g_fg.neg_log_likelihood(a) + 1.7 * loc_fg)
    np.testing.assert_allclose(bg, g_bg.neg_log_likelihood(a) + 1.7 * loc_bg)
    fg0, bg0 = energy.unary_potentials(a, g_fg, g_bg, loc_fg, loc_bg, eta=0.0)
    np.testing.assert_allclose(fg0, g_fg.neg_log_likelihood(a))


def test_location_decides_when_colour_is_uninformative():
    g = unit_gmm(np.full(6, 0.5))
    fg, bg = energy.unary_potentials(np.full((1, 6), 0.3), g, g, np.array([0.0]), np.array([0.9]), eta=1.0)
    assert fg[0] < bg[0]


def test_unary_is_capped():
    g_far = GmmModel(np.ones(1), np.zeros((1, 6)), np.eye(6)[None] * 1e-4)
    fg, _ = energy.unary_potentials(np.full((1, 6), 10.0), g_far, g_far, [0.0], [0.0], 1.0)
    assert fg[0] == energy.COST_CAP


def test_spatial_weight_cases():
    a = np.zeros(6)
    assert energy.spatial_weight(a, a, (0, 0), (2, 0), alpha=3.3) == pytest.approx(0.5)
    b = np.zeros(6)
    b[0] = math.log(2)
    assert energy.spatial_weight(a, b, (0, 0), (0, 2), alpha=1.0) == pytest.approx(0.25)
    assert energy.spatial_weight(a, b, (1, 1), (1, 1), alpha=1.0) == pytest.approx(0.5)
    assert energy.spatial_weight(a, b, (0, 0), (0, 2), 1.0) == energy.spatial_weight(b, a, (0, 2), (0, 0), 1.0)


def test_temporal_weight_cases():
    a = np.zeros(6)
    assert energy.temporal_weight(a, a, 5.0, 1.0) == 1.0
    b = np.zeros(6)
    b[3] = math.log(2)
    assert energy.temporal_weight(a, b, 1.0, 0.5) == pytest.approx(0.25)


def test_energy_of_constant_labelling_is_unary_sum(rng):
    fg, bg = rng.random(4), rng.random(4)
    edges = [(0, 1, 1.0), (1, 2, 2.0)]
    t_edges = [(2, 3, 0.5)]
    assert energy.total_energy([1] * 4, fg, bg, edges, t_edges, 2, 3) == pytest.approx(fg.sum())
    assert energy.total_energy([0] * 4, fg, bg, edges, t_edges, 2, 3) == pytest.approx(bg.sum())


def test_flipping_isolated_node_changes_only_its_unary(rng):
    fg, bg = rng.random(4), rng.random(4)
    edges = [(0, 1, 1.0)]
    e0 = energy.total_energy([0, 1, 0, 0], fg, bg, edges, [], 2, 2)
    e1 = energy.total_energy([0, 1, 0, 1], fg, bg, edges, [], 2, 2)
    assert e1 - e0 == pytest.approx(fg[3] - bg[3])


def test_energy_terms_breakdown():
    terms = energy.energy_terms([1, 0, 0], [1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [(0, 1, 0.5)], [(0, 2, 0.25)], 2.0, 4.0)
    assert (terms.unary, terms.spatial, terms.temporal) == (12.0, 1.0, 1.0)
    assert terms.total == 14.0


def test_single_node_graph():
    labels, e = energy.build_st_graph([1.0], [3.0], [], [], 1, 1).solve()
    assert list(labels) == [1] and e == pytest.approx(1.0)


def test_strong_edge_pulls_both_nodes():
    # node 0 prefers fg by 5, node 1 prefers bg by 1; an edge worth 3 makes both fg
    fg, bg = [0.0, 1.0], [5.0, 0.0]
    labels, e = energy.build_st_graph(fg, bg, [(0, 1, 3.0)], [], 1.0, 1.0).solve()
    best, arg = brute_force_energy(fg, bg, [(0, 1, 3.0)])
    assert list(labels) == [1, 1] == list(arg)
    assert e == pytest.approx(best)
    # a weak edge lets them split
    labels, _ = energy.build_st_graph(fg, bg, [(0, 1, 0.5)], [], 1.0, 1.0).solve()
    assert list(labels) == [1, 0]


def test_negative_pairwise_weight_is_rejected():
    with pytest.raises(ValueError):
        energy.build_st_graph([0.0, 0.0], [0.0, 0.0], [(0, 1, -1.0)], [], 1.0, 1.0)


def test_cut_labelling_is_the_global_minimum(rng):
    for _ in range(60):
        n = int(rng.integers(1, 11))
        fg, bg = rng.normal(0, 3, n), rng.normal(0, 3, n)
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4]
        split = int(rng.integers(0, len(pairs) + 1))
        sp = [(i, j, float(rng.uniform(0, 2))) for i, j in pairs[:split]]
        tp = [(i, j, float(rng.uniform(0, 2))) for i, j in pairs[split:]]
        g1, g2 = rng.uniform(0, 3, 2)
        labels, e = energy.build_st_graph(fg, bg, sp, tp, g1, g2).solve()
        combined = [(i, j, g1 * w) for i, j, w in sp] + [(i, j, g2 * w) for i, j, w in tp]
        best, _ = brute_force_energy(fg, bg, combined)
        assert energy.total_energy(labels, fg, bg, sp, tp, g1, g2) == pytest.approx(best, abs=1e-9)
        assert e == pytest.approx(best, abs=1e-9)
        # no random labelling beats the cut
        for _ in range(20):
            other = rng.integers(0, 2, n)
            assert energy.total_energy(other, fg, bg, sp, tp, g1, g2) >= best - 1e-9
