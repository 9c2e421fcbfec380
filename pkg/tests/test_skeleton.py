import itertools

import pytest
from hypothesis import given

from conftest import graph_with_vertices, graphs
from fmdiameter.core_model import FracVertex, Graph, complete_graph, cycle_graph, path_graph
from fmdiameter.skeleton import (
    SizeGuardError, bfs_diameter, build_skeleton, enumerate_vertices, is_adjacent_exact,
    is_adjacent_full_matrix,
)

K3 = complete_graph(3)
ZERO = FracVertex()
HALF_K3 = FracVertex([], [(0, 1, 2)])


def test_enumerate_empty_graph():
    assert enumerate_vertices(Graph(3, ())) == [ZERO]


def test_enumerate_k3():
    vs = enumerate_vertices(K3)
    assert len(vs) == 5
    assert set(vs) == {ZERO, FracVertex([(0, 1)]), FracVertex([(0, 2)]), FracVertex([(1, 2)]), HALF_K3}


def test_enumerate_p3():
    assert set(enumerate_vertices(path_graph(3))) == {ZERO, FracVertex([(0, 1)]), FracVertex([(1, 2)])}


def test_enumerate_canonical_order():
    vs = enumerate_vertices(complete_graph(5))
    assert vs == sorted(vs) and len(set(vs)) == len(vs)


def test_enumerate_size_guard():
    with pytest.raises(SizeGuardError):
        enumerate_vertices(path_graph(14))


@pytest.mark.parametrize("x, y, expect", [
    (ZERO, FracVertex([(0, 1)]), True),
    (ZERO, HALF_K3, False),
    (FracVertex([(0, 1)]), HALF_K3, True),
])
def test_adjacency_k3(x, y, expect):
    assert is_adjacent_exact(K3, x, y) is expect
    assert is_adjacent_full_matrix(K3, x, y) is expect


def test_adjacency_identical():
    with pytest.raises(ValueError, match="identical vertices"):
        is_adjacent_exact(K3, ZERO, ZERO)


@given(graph_with_vertices(k=2, max_n=6))
def test_reduced_rank_test_matches_full_matrix(gxy):
    g, x, y = gxy
    if x == y:
        return
    assert is_adjacent_exact(g, x, y) == is_adjacent_full_matrix(g, x, y) == is_adjacent_exact(g, y, x)


@pytest.mark.parametrize("g, expect", [(path_graph(3), 1), (K3, 2), (cycle_graph(5), 3)])
def test_bfs_diameter(g, expect):
    assert bfs_diameter(g)[0] == expect


def test_bfs_diameter_k3_pair():
    _, (x, y) = bfs_diameter(K3)
    assert {x, y} == {ZERO, HALF_K3}


@given(graphs(max_n=5))
def test_skeleton_symmetric_and_loopless(g):
    sk = build_skeleton(g)
    for i, nbrs in enumerate(sk.adjacency):
        assert i not in nbrs
        for j in nbrs:
            assert i in sk.adjacency[j]


@given(graphs(max_n=6))
def test_every_vertex_reaches_zero(g):
    sk = build_skeleton(g)
    assert min(sk.distances_from(sk.index(ZERO))) >= 0


def test_matching_polytope_edges_on_c4():
    # bipartite: skeleton distance between the two perfect matchings of C4 is 1
    sk = build_skeleton(cycle_graph(4))
    assert sk.distance(FracVertex([(0, 1), (2, 3)]), FracVertex([(0, 3), (1, 2)])) == 1


def test_every_edge_of_k4_skeleton_passes_full_rank_test():
    g = complete_graph(4)
    sk = build_skeleton(g)
    for i, j in itertools.combinations(range(len(sk.vertices)), 2):
        assert (j in sk.adjacency[i]) == is_adjacent_full_matrix(g, sk.vertices[i], sk.vertices[j])
