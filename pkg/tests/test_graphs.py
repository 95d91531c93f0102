import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from theseus.errors import GraphError
from theseus.graphs import (
    ColoredGraph,
    Edge,
    add_edge,
    complete_gate_graph,
    complete_graph,
    enumerate_perfect_matchings,
    remove_edge,
)
from theseus.states import postselected_state


def test_complete_graph_edge_counts():
    assert complete_graph(4, 2).n_edges == 24
    assert complete_graph(6, 3).n_edges == 135
    assert complete_graph(2, 1).n_edges == 1


def test_complete_graph_invalid_parameters():
    with pytest.raises(GraphError):
        complete_graph(1, 2)
    with pytest.raises(GraphError):
        complete_graph(4, 0)


def test_edge_canonical_identity():
    e1 = Edge(3, 1, 0, 2, 1j)
    e2 = Edge(1, 3, 2, 0, 1j)
    assert e1 == e2
    assert e1.key == (1, 3, 2, 0)
    with pytest.raises(GraphError):
        Edge(2, 2, 0, 0, 1.0)


def test_duplicate_edges_rejected():
    with pytest.raises(GraphError):
        ColoredGraph(2, 1, (Edge(0, 1, 0, 0, 1.0), Edge(1, 0, 0, 0, 2.0)))


def test_matching_counts_complete_one_color():
    # (2m-1)!! for m pairs
    for m, expected in ((1, 1), (2, 3), (3, 15), (4, 105)):
        g = complete_graph(2 * m, 1)
        assert len(enumerate_perfect_matchings(g)) == expected


def test_ghz_cycle_has_two_matchings():
    g = ColoredGraph(4, 2, (
        Edge(0, 1, 0, 0, 1.0), Edge(2, 3, 0, 0, 1.0),
        Edge(1, 2, 1, 1, 1.0), Edge(0, 3, 1, 1, 1.0)))
    assert len(enumerate_perfect_matchings(g)) == 2
    # removing one cycle edge leaves a single perfect matching
    assert len(enumerate_perfect_matchings(remove_edge(g, 0))) == 1


def test_odd_cover_has_no_matchings():
    g = complete_graph(4, 1)
    assert enumerate_perfect_matchings(g, (0, 1, 2)) == []


def test_parallel_colored_edges_enumerate_separately():
    g = ColoredGraph(2, 2, (Edge(0, 1, 0, 0, 1.0), Edge(0, 1, 1, 1, 1.0)))
    assert len(enumerate_perfect_matchings(g)) == 2


def test_remove_edge_cardinality_and_immutability():
    g = complete_graph(4, 2)
    h = remove_edge(g, 5)
    assert h.n_edges == 23 and g.n_edges == 24
    with pytest.raises(GraphError):
        remove_edge(g, 24)


def test_remove_zero_weight_edge_preserves_amplitudes():
    rng = np.random.default_rng(5)
    g = complete_graph(4, 2)
    w = rng.normal(size=24) + 1j * rng.normal(size=24)
    w[7] = 0.0
    g = g.with_weights(w)
    before, _ = postselected_state(g)
    after, _ = postselected_state(remove_edge(g, 7))
    assert set(before) == set(after)
    for k in before:
        assert before[k] == pytest.approx(after[k], abs=1e-12)


def test_remove_then_readd_restores_amplitudes():
    rng = np.random.default_rng(6)
    g = complete_graph(4, 2).with_weights(rng.normal(size=24) + 1j * rng.normal(size=24))
    edge = g.edges[11]
    h = add_edge(remove_edge(g, 11), edge)
    a, _ = postselected_state(g)
    b, _ = postselected_state(h)
    assert set(a) == set(b)
    for k in a:
        assert a[k] == pytest.approx(b[k], abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(n=st.sampled_from([2, 4, 6]), d=st.integers(1, 2), seed=st.integers(0, 999))
def test_matchings_are_valid_and_unique(n, d, seed):
    rng = np.random.default_rng(seed)
    g = complete_graph(n, d)
    keep = tuple(e for e in g.edges if rng.uniform() < 0.7)
    if not keep:
        keep = g.edges[:1]
    g = ColoredGraph(n, d, keep)
    ms = enumerate_perfect_matchings(g)
    assert len(set(ms)) == len(ms)
    for m in ms:
        covered = []
        for i in m:
            covered += [g.edges[i].u, g.edges[i].v]
        assert sorted(covered) == list(range(n))
    # pure function: repeated calls identical
    assert enumerate_perfect_matchings(g) == ms
    assert ms == sorted(ms)


def test_gate_graph_has_no_virtual_virtual_edges():
    g = complete_gate_graph(4, 2, 2)
    for e in g.edges:
        assert not (e.u in g.virtual_vertices and e.v in g.virtual_vertices)
    assert g.virtual_vertices == frozenset((4, 5))


def test_flat_weight_round_trip():
    rng = np.random.default_rng(2)
    g = complete_graph(4, 2)
    x = rng.normal(size=2 * g.n_edges)
    assert np.allclose(g.with_flat_weights(x).flat_weights(), x)
