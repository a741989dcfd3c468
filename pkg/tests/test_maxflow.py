import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlvseg.maxflow import FlowNetwork, cut_to_labels
from oracles import brute_force_min_cut


def network(n, arcs, s=0, t=None):
    net = FlowNetwork(n, s, n - 1 if t is None else t)
    ids = [net.add_edge(u, v, c) for u, v, c in arcs]
    return net, ids


def test_single_arc():
    net, _ = network(2, [(0, 1, 3.0)])
    assert net.max_flow() == (3.0, {0})


def test_diamond():
    s, a, b, t = 0, 1, 2, 3
    arcs = [(s, a, 3), (s, b, 2), (a, t, 2), (b, t, 3), (a, b, 1)]
    net, _ = network(4, arcs)
    value, _ = net.max_flow()
    # enumerating the four s-t cuts gives {s}: 5, {s,a}: 5, {s,b}: 6, {s,a,b}: 5
    assert brute_force_min_cut(4, arcs, s, t) == 5
    assert value == pytest.approx(5.0)


def test_unreachable_sink():
    net, _ = network(4, [(0, 1, 2.0), (2, 3, 5.0)])
    assert net.max_flow() == (0.0, {0, 1})


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        FlowNetwork(3, 1, 1)
    net = FlowNetwork(3, 0, 2)
    with pytest.raises(ValueError):
        net.add_edge(0, 1, -1.0)


def test_cut_to_labels():
    assert cut_to_labels({0, 1, 2}, [0, 1, 2]) == [1, 1, 1]
    assert cut_to_labels({5}, [0, 1, 2]) == [0, 0, 0]
    assert cut_to_labels({1}, [0, 1]) == [0, 1]


def random_graph(rng, n):
    arcs = []
    for u in range(n):
        for v in range(n):
            if u != v and v != 0 and u != n - 1 and rng.random() < 0.4:
                arcs.append((u, v, float(rng.uniform(0, 5))))
    return arcs


def test_flow_conservation_and_cut_capacity(rng):
    for _ in range(30):
        n = int(rng.integers(3, 12))
        arcs = random_graph(rng, n)
        net, ids = network(n, arcs)
        value, side = net.max_flow()
        balance = np.zeros(n)
        for (u, v, c), e in zip(arcs, ids):
            f = net.flow_on(e)
            assert -1e-9 <= f <= c + 1e-9
            balance[u] -= f
            balance[v] += f
        np.testing.assert_allclose(balance[1:-1], 0.0, atol=1e-9)
        cut = sum(c for u, v, c in arcs if u in side and v not in side)
        assert abs(cut - value) <= 1e-9
        assert 0 in side and n - 1 not in side


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 9))
def test_matches_enumeration(seed, n):
    rng = np.random.default_rng(seed)
    arcs = random_graph(rng, n)
    net, _ = network(n, arcs)
    value, _ = net.max_flow()
    assert abs(value - brute_force_min_cut(n, arcs, 0, n - 1)) <= 1e-9


def test_deterministic(rng):
    arcs = random_graph(rng, 10)
    assert network(10, arcs)[0].max_flow() == network(10, arcs)[0].max_flow()
