from collections import Counter
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltqdiag.errors import DimensionOutOfRange, FormatError, InvalidVertex, SameVertex
from ltqdiag.topology.ltq_graph import (
    LtqGraph,
    VertexSet,
    adjacent,
    build,
    common_neighbors,
    edges,
    format_label,
    half_cube,
    has_triangle,
    neighbor_labels,
    neighbors,
    neighbors_recursive,
    parse_label,
    to_networkx,
)


def test_ltq2_is_the_four_cycle():
    G = build(2)
    assert [(format_label(u, 2), format_label(v, 2)) for u, v in edges(G)] == [
        ("00", "01"),
        ("00", "10"),
        ("01", "11"),
        ("10", "11"),
    ]


def test_twisted_neighbor_when_low_bit_is_one():
    G = build(3)
    # 001: dimension 2 flips bit 2 and, since u_0 = 1, bit 1 too
    assert neighbors(G, 0b001).labels() == ["000", "011", "111"]
    assert neighbors(G, 0b000).labels() == ["001", "010", "100"]


def test_rules_match_recursive_construction():
    for n in range(2, 9):
        G = build(n)
        for v in range(G.order):
            assert neighbors(G, v) == neighbors_recursive(G, v), (n, v)


def test_regular_with_expected_edge_count():
    for n in range(2, 11):
        G = build(n)
        assert all(len(set(neighbor_labels(G, v))) == n for v in range(G.order))
        assert len(edges(G)) == n * 2 ** (n - 1)


def test_triangle_free_and_at_most_two_common_neighbors():
    for n in range(2, 9):
        G = build(n)
        assert not has_triangle(G)
        assert sum(nx.triangles(to_networkx(G)).values()) == 0
        shared = Counter()
        for w in range(G.order):
            shared.update(combinations(sorted(neighbor_labels(G, w)), 2))
        assert max(shared.values()) <= 2


def test_common_neighbors_of_adjacent_vertices_is_empty():
    G = build(4)
    assert common_neighbors(G, 0b0000, 0b0001).is_empty()


def test_common_neighbors_rejects_same_vertex():
    with pytest.raises(SameVertex):
        common_neighbors(build(4), 3, 3)


def test_connectivity_equals_dimension():
    for n in (3, 4, 5):
        H = to_networkx(build(n))
        assert nx.is_connected(H)
        assert nx.node_connectivity(H) == n


@pytest.mark.parametrize("n", [0, 1, 31, "4"])
def test_dimension_out_of_range(n):
    with pytest.raises(DimensionOutOfRange):
        LtqGraph(n)


def test_invalid_vertex():
    G = build(3)
    with pytest.raises(InvalidVertex):
        neighbors(G, 8)
    with pytest.raises(InvalidVertex):
        adjacent(G, -1, 0)


def test_large_dimension_without_table():
    G = build(21)
    assert G.neighbor_table is None
    nb = neighbors(G, 1)
    assert len(nb) == 21
    assert all(adjacent(G, 1, w) for w in nb)


def test_half_cubes_partition_vertices():
    G = build(4)
    low, high = half_cube(G, 0), half_cube(G, 1)
    assert len(low) == len(high) == 8
    assert (low | high) == VertexSet.full(4)
    assert (low & high).is_empty()
    with pytest.raises(InvalidVertex):
        half_cube(G, 2)


def test_labels_round_trip_and_reject_bad_width():
    assert parse_label("0110", 4) == 6
    assert format_label(6, 4) == "0110"
    with pytest.raises(FormatError):
        parse_label("110", 4)
    with pytest.raises(FormatError):
        parse_label("01a0", 4)


def test_vertex_set_operations():
    A = VertexSet.of(4, ["0000", "0010"])
    B = VertexSet.of(4, [2, 5])
    assert A.mask == 0b101
    assert VertexSet.from_mask(4, A.mask) == A
    assert (A | B).labels() == ["0000", "0010", "0101"]
    assert (A & B).labels() == ["0010"]
    assert (A - B).labels() == ["0000"]
    assert (A ^ B).labels() == ["0000", "0101"]
    assert len(A.complement()) == 14
    assert list(B) == [2, 5]
    assert A.canonical_key() == (0, 2)


def test_vertex_set_rejects_mixed_dimensions_and_bad_members():
    with pytest.raises(InvalidVertex):
        VertexSet.of(3, [1]) | VertexSet.of(4, [1])
    with pytest.raises(InvalidVertex):
        VertexSet(3, frozenset({8}))


def test_vertex_set_rejects_masks_outside_the_graph():
    with pytest.raises(InvalidVertex):
        VertexSet.from_mask(2, 1 << 4)
    with pytest.raises(InvalidVertex):
        VertexSet.from_mask(2, -1)
    with pytest.raises(InvalidVertex):
        VertexSet(3, [True])
    assert 8 not in VertexSet.full(3)
    assert VertexSet.of(3, [1, 6]).members == frozenset({1, 6})


def test_half_cubes_of_a_large_graph():
    G = build(26)
    low, high = half_cube(G, 0), half_cube(G, 1)
    assert len(low) == len(high) == 1 << 25
    assert low.mask == (1 << (1 << 25)) - 1
    assert low.complement() == high
    assert (low | high) == VertexSet.full(26)
    assert 0 in low and (1 << 25) in high and (1 << 25) not in low


def test_iteration_of_a_big_set_is_ascending():
    high = half_cube(build(14), 1)
    assert list(high) == list(range(1 << 13, 1 << 14))


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_member_arrays_follow_iteration_order(data):
    n = data.draw(st.integers(min_value=2, max_value=6))
    S = VertexSet.from_mask(n, data.draw(st.integers(0, 2 ** (2**n) - 1)))
    chunks = [a.tolist() for a in S.member_arrays(chunk=8)]
    assert [v for c in chunks for v in c] == list(S) == sorted(S.members)
    assert len(S) == len(S.members)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_adjacency_is_symmetric(data):
    n = data.draw(st.integers(min_value=2, max_value=12))
    G = build(n)
    v = data.draw(st.integers(min_value=0, max_value=G.order - 1))
    for w in neighbor_labels(G, v):
        assert adjacent(G, v, w)
        assert v in neighbor_labels(G, w)
    assert not adjacent(G, v, v)
