import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smoothdyn.graph import (
    DynamicGraph,
    GraphError,
    all_pairs,
    index_pair,
    pair,
    pair_count,
    pair_index,
    random_graph,
    read_edge_list,
    uniform_pair,
    write_edge_list,
)


def test_pair_canonical():
    assert pair(3, 1) == (1, 3) == pair(1, 3)
    with pytest.raises(GraphError):
        pair(2, 2)
    with pytest.raises(GraphError):
        pair(-1, 2)


def test_empty_and_complete_graph():
    g = DynamicGraph(4)
    assert g.edge_count() == 0
    assert all(g.degree(v) == 0 for v in range(4))
    k4 = DynamicGraph(4, list(all_pairs(4)))
    assert k4.edge_count() == 6
    assert all(k4.degree(v) == 3 for v in range(4))


def test_path_degrees():
    g = DynamicGraph(3, [(0, 1), (1, 2)])
    assert [g.degree(v) for v in range(3)] == [1, 2, 1]


def test_construction_errors():
    with pytest.raises(GraphError):
        DynamicGraph(3, [(0, 1), (1, 0)])  # duplicate after canonicalization
    with pytest.raises(GraphError):
        DynamicGraph(3, [(0, 5)])


def test_flip_add_remove():
    g = DynamicGraph(4)
    assert g.flip(0, 1) is True
    assert g.flip(0, 1) is False
    assert g.edge_count() == 0
    assert g.add(0, 1) is True
    assert g.add(1, 0) is False  # already present
    assert g.remove(0, 1) is True
    assert g.remove(0, 1) is False
    k4 = DynamicGraph(4, list(all_pairs(4)))
    k4.flip(2, 3)
    assert k4.edge_count() == 5


@given(st.integers(2, 12), st.data())
def test_flip_involution_and_degrees(n, data):
    edges = data.draw(
        st.lists(
            st.sampled_from(list(all_pairs(n))), unique=True, max_size=pair_count(n)
        )
    )
    g = DynamicGraph(n, edges)
    before = g.edge_set()
    ops = data.draw(st.lists(st.sampled_from(list(all_pairs(n))), max_size=40))
    for e in ops:
        g.flip(*e)
    for e in reversed(ops):
        g.flip(*e)
    assert g.edge_set() == before
    # maintained degrees match a from-scratch recomputation
    for v in range(n):
        assert g.degree(v) == sum(1 for a, b in g.edges() if v in (a, b))


@pytest.mark.parametrize("n", [2, 3, 5, 9])
def test_index_pair_bijection(n):
    decoded = [index_pair(n, i) for i in range(pair_count(n))]
    assert decoded == list(all_pairs(n))
    assert [pair_index(n, e) for e in decoded] == list(range(pair_count(n)))
    with pytest.raises(GraphError):
        index_pair(n, pair_count(n))


def test_uniform_pair_marginals():
    rng = np.random.default_rng(0)
    n = 5
    counts = {e: 0 for e in all_pairs(n)}
    draws = 20000
    for _ in range(draws):
        counts[uniform_pair(n, rng)] += 1
    expected = draws / pair_count(n)
    for e, c in counts.items():
        assert abs(c - expected) < 5 * np.sqrt(expected), e


def test_random_graph_marginals():
    rng = np.random.default_rng(1)
    total_edges = sum(random_graph(4, rng).edge_count() for _ in range(2000))
    assert abs(total_edges / 2000 - 3.0) < 0.15


def test_random_graph_restriction():
    rng = np.random.default_rng(2)
    assert random_graph(6, rng, restriction=[]).edge_count() == 0
    hits = 0
    for _ in range(2000):
        g = random_graph(6, rng, restriction=[(0, 1)])
        assert g.edge_set() <= {(0, 1)}
        hits += g.edge_count()
    assert abs(hits / 2000 - 0.5) < 0.04
    for seed in range(50):
        g = random_graph(8, np.random.default_rng(seed), restriction=[(0, 1), (2, 3)])
        assert g.edge_set() <= {(0, 1), (2, 3)}


def test_edge_list_roundtrip():
    g = DynamicGraph(5, [(0, 1), (2, 4), (1, 3)])
    buf = io.StringIO()
    write_edge_list(g, buf)
    text = buf.getvalue()
    assert text.startswith("5 3\n") and text.endswith("\n")
    back = read_edge_list(io.StringIO(text))
    assert back.n == g.n and back.edge_set() == g.edge_set()
