import numpy as np
import pytest

import golden
from biwalk.errors import (
    BadSizeError,
    DuplicateEdgeError,
    IsolatedVertexError,
    NotBipartiteError,
)
from biwalk.graphs import (
    build_partitions,
    characteristic_matrix,
    complete_graph,
    crown_graph,
    cycle_graph,
    from_edge_list,
    incidence_bundle,
    path_graph,
    simple_graph,
    subdivision,
    two_coloring,
)


def test_canonical_edge_order(ex8):
    assert ex8.edges == ((0, 1), (0, 5), (2, 1), (4, 1), (2, 3), (6, 5), (6, 7))
    shuffled = from_edge_list(golden.EX8_PART_B, golden.EX8_PART_A, reversed(golden.EX8_EDGES))
    assert sorted(shuffled.edges) == sorted((b, a) for a, b in ex8.edges)


def test_validation_errors():
    with pytest.raises(NotBipartiteError):
        from_edge_list([0, 2], [1], [(0, 2)])
    with pytest.raises(NotBipartiteError):
        from_edge_list([0], [1], [(0, 9)])
    with pytest.raises(NotBipartiteError):
        from_edge_list([0, 1], [1], [(0, 1)])
    with pytest.raises(DuplicateEdgeError):
        from_edge_list([0], [1], [(0, 1), (1, 0)])
    with pytest.raises(IsolatedVertexError):
        from_edge_list([0, 2], [1], [(0, 1)])
    with pytest.raises(ValueError):
        from_edge_list([0], [1], [(0, 1)], designated="C")


def test_families():
    p = path_graph(6)
    assert p.num_edges == 5 and p.edges[0] == (0, 1) and p.edges[-1] == (4, 5)
    c = cycle_graph(8)
    assert c.edges[-1] == (0, 7) and set(c.degrees.values()) == {2}
    cr = crown_graph(5)
    assert cr.num_edges == 20 and cr.biregularity == (4, 4)
    for bad in (lambda: path_graph(1), lambda: cycle_graph(5), lambda: cycle_graph(2), lambda: crown_graph(2)):
        with pytest.raises(BadSizeError):
            bad()


def test_two_coloring():
    a, b = two_coloring([3, 1, 2, 4], [(1, 2), (2, 3), (3, 4)])
    assert sorted(a) == [1, 3] and sorted(b) == [2, 4]
    with pytest.raises(NotBipartiteError):
        two_coloring([0, 1, 2], [(0, 1), (1, 2), (2, 0)])


def test_partitions_and_bundle(ex8):
    parts = build_partitions(ex8)
    assert parts.keys_p == (1, 3, 5, 7) and parts.keys_q == (0, 2, 4, 6)
    b = incidence_bundle(ex8, parts)
    assert np.array_equal(b.C, golden.EX8_C)
    assert np.array_equal(b.C, b.P1.T @ b.P0)
    assert np.allclose(b.Chat, b.P1hat.T @ b.P0hat)
    assert b.Abip.shape == (8, 8) and np.array_equal(b.Abip, b.Abip.T)
    # swapping the designated part transposes C
    other = incidence_bundle(ex8, build_partitions(ex8, "A"))
    assert np.array_equal(other.C, b.C.T)


def test_characteristic_matrix():
    m = characteristic_matrix(4, [[0, 2], [1], [3]])
    assert m.tolist() == [[1, 0, 0], [0, 1, 0], [1, 0, 0], [0, 0, 1]]


def test_simple_graph_and_subdivision():
    k4 = complete_graph(4)
    assert len(k4.edges) == 6 and len(k4.arcs()) == 12
    with pytest.raises(DuplicateEdgeError):
        simple_graph(None, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        simple_graph(None, [(0, 0)])
    bg, bij = subdivision(k4)
    assert bg.designated == "A" and bg.num_edges == 12
    assert sorted(bij.values()) == k4.arcs()


def test_json_shape(ex8):
    d = ex8.to_json()
    assert d["partA"] == [0, 2, 4, 6] and d["edges"][1] == [0, 5]
    assert ex8.adjacency().sum() == 14
    assert ex8.connected
