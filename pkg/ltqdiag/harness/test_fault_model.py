from unittest.mock import patch

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltqdiag.config import heavy_enabled
from ltqdiag.errors import BudgetExceeded, DimensionOutOfRange, EmptySet, GOutOfRange, InvalidBound
from ltqdiag.harness import masks
from ltqdiag.harness.fault_model import (
    components,
    is_conditional_faulty_set,
    is_cut,
    is_g_good_neighbor_set,
    kappa_g,
    neighborhood_of_set,
    verify_min_subgraph_order,
)
from ltqdiag.topology import ltq_graph
from ltqdiag.topology.ltq_graph import LtqGraph, VertexSet, half_cube, neighbor_labels, neighbors, to_networkx

G4 = LtqGraph(4)
A = VertexSet.of(4, ["0000", "0010"])
F1 = VertexSet.of(4, ["1000", "1010", "0100", "0110", "0001", "0011"])
F2 = F1 | A

heavy = pytest.mark.skipif(not heavy_enabled(), reason="set LTQDIAG_HEAVY=1")


def test_neighborhood_of_edge():
    assert neighborhood_of_set(G4, A) == F1
    assert neighborhood_of_set(G4, VertexSet.full(4)).is_empty()


def test_neighborhood_of_empty_set():
    with pytest.raises(EmptySet):
        neighborhood_of_set(G4, VertexSet(4))


def test_good_neighbor_checks():
    assert is_g_good_neighbor_set(G4, VertexSet(4), 4).is_gng
    assert is_g_good_neighbor_set(G4, F2, 1).is_gng

    # N(0000) isolates 0000
    r = is_g_good_neighbor_set(G4, neighbors(G4, 0), 1)
    assert not r.is_gng
    assert r.violating_vertex == 0
    assert r.free_neighbor_count == 0
    assert r.to_dict(4)["violating_vertex"] == "0000"


def _slow_good_neighbor(G, F, g):
    for v in range(G.order):
        if v not in F:
            free = sum(1 for w in neighbor_labels(G, v) if w not in F)
            if free < g:
                return False, v, free
    return True, None, None


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_border_scan_matches_a_full_scan(data):
    n = data.draw(st.sampled_from([3, 4, 5]))
    G = LtqGraph(n)
    F = VertexSet.from_mask(n, data.draw(st.integers(0, 2**G.order - 1)))
    g = data.draw(st.integers(0, n))
    expected = _slow_good_neighbor(G, F, g)
    r = is_g_good_neighbor_set(G, F, g)
    assert (r.is_gng, r.violating_vertex, r.free_neighbor_count) == expected
    cond = is_conditional_faulty_set(G, F)
    with patch.object(ltq_graph, "SCAN_LIMIT", 0):
        bulk = is_g_good_neighbor_set(G, F, g)
        assert (bulk.is_gng, bulk.violating_vertex, bulk.free_neighbor_count) == expected
        assert is_conditional_faulty_set(G, F) == cond
        if not F.is_empty():
            assert neighborhood_of_set(G, F) == VertexSet(n, {w for v in F for w in neighbor_labels(G, v)}) - F


def test_good_neighbor_check_on_a_large_graph():
    G = LtqGraph(22)
    F = VertexSet(22, [0, 1, 2])
    assert is_g_good_neighbor_set(G, F, 20).is_gng
    r = is_g_good_neighbor_set(G, F, 21)
    assert (r.is_gng, r.violating_vertex, r.free_neighbor_count) == (False, 3, 20)
    assert is_conditional_faulty_set(G, F).is_gng


def test_good_neighbor_check_of_a_half_cube():
    G = LtqGraph(20)
    low = half_cube(G, 0)
    assert is_g_good_neighbor_set(G, low, 19).is_gng
    r = is_g_good_neighbor_set(G, low, 20)
    assert (r.violating_vertex, r.free_neighbor_count) == (1 << 19, 19)
    assert is_conditional_faulty_set(G, low).is_gng


@pytest.mark.parametrize("g", [-1, 5])
def test_good_neighbor_g_out_of_range(g):
    with pytest.raises(GOutOfRange):
        is_g_good_neighbor_set(G4, VertexSet(4), g)


def test_conditional_faulty_set():
    assert is_conditional_faulty_set(G4, F1).is_gng
    r = is_conditional_faulty_set(G4, neighbors(G4, 0))
    assert not r.is_gng
    assert r.violating_vertex == 0
    assert is_conditional_faulty_set(G4, VertexSet(4, [1, 2])).is_gng


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_conditional_sets_and_one_good_neighbor_sets(data):
    n = data.draw(st.sampled_from([3, 4, 5]))
    G = LtqGraph(n)
    F = VertexSet(n, data.draw(st.sets(st.integers(0, G.order - 1), max_size=G.order // 2)))
    conditional = is_conditional_faulty_set(G, F).is_gng
    one_good = is_g_good_neighbor_set(G, F, 1).is_gng
    swallowed = any(all(w in F for w in neighbor_labels(G, v)) for v in F)
    if conditional:
        assert one_good
    if one_good and not swallowed:
        assert conditional


def test_components_put_the_isolated_vertex_first():
    parts = components(G4, neighbors(G4, 0))
    assert parts[0] == VertexSet.of(4, ["0000"])
    sizes = [len(p) for p in parts]
    assert sizes == sorted(sizes)
    assert sum(sizes) == 16 - 4


def test_components_of_four_cycle_minus_opposite_pair():
    G = LtqGraph(2)
    parts = components(G, VertexSet.of(2, ["01", "10"]))
    assert [p.labels() for p in parts] == [["00"], ["11"]]


def test_witness_neighborhood_cuts_off_the_edge():
    parts = components(G4, F1)
    assert parts[0] == A
    report = is_cut(G4, F1)
    assert report.found
    assert report.component_count == len(parts) >= 2
    assert sum(report.component_sizes) == 16 - 6


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=2**16 - 1))
def test_components_match_networkx(mask):
    F = VertexSet.from_mask(4, mask)
    H = to_networkx(G4)
    H.remove_nodes_from(F)
    expected = sorted(sorted(c) for c in nx.connected_components(H))
    assert sorted(sorted(p) for p in components(G4, F)) == expected


@pytest.mark.parametrize("g, bound, expected", [(0, 5, 4), (1, 7, 6), (2, 9, 8)])
def test_kappa_small(g, bound, expected):
    report = kappa_g(G4, g, bound)
    assert report.found
    assert report.size == expected
    assert report.component_count >= 2
    assert is_g_good_neighbor_set(G4, report.cut, g).is_gng
    assert set(report.to_dict()) == {"size", "cut", "component_sizes"}


def test_kappa_reports_not_found_below_the_answer():
    report = kappa_g(G4, 1, 5)
    assert not report.found
    assert report.cut.is_empty()


def test_kappa_rejects_bad_arguments():
    with pytest.raises(GOutOfRange):
        kappa_g(G4, 3, 8)
    with pytest.raises(InvalidBound):
        kappa_g(G4, 1, 0)
    with pytest.raises(BudgetExceeded):
        kappa_g(G4, 1, 7, budget=100)
    with pytest.raises(DimensionOutOfRange):
        kappa_g(LtqGraph(7), 1, 2)


def test_kappa_is_independent_of_workers(monkeypatch):
    a = kappa_g(G4, 1, 7, workers=1)
    monkeypatch.setattr(masks, "PARALLEL_MIN_CANDIDATES", 0)
    b = kappa_g(G4, 1, 7, workers=2)
    assert a.cut == b.cut


@pytest.mark.parametrize("g, bound", [(1, 2), (2, 4), (3, 8)])
def test_no_small_dense_subgraph(g, bound):
    assert verify_min_subgraph_order(G4, g, bound)


def test_min_subgraph_bound_capped_at_two_to_g():
    with pytest.raises(InvalidBound):
        verify_min_subgraph_order(G4, 2, 5)


@heavy
@pytest.mark.parametrize("g, expected", [(0, 5), (1, 8), (2, 12)])
def test_kappa_ltq5(g, expected):
    report = kappa_g(LtqGraph(5), g, expected + 1, budget=10**9, workers=4)
    assert report.found
    assert report.size == expected == 2**g * (5 - g)
