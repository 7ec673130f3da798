from math import comb

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltqdiag.errors import BudgetExceeded, DimensionOutOfRange
from ltqdiag.harness import masks
from ltqdiag.harness.fault_model import is_g_good_neighbor_set
from ltqdiag.topology.ltq_graph import LtqGraph, VertexSet, to_networkx


def test_canonical_order_is_ascending_member_lists():
    X = np.array([0b1100, 0b0011, 0b1010, 0b0101, 0b0110, 0b1001], dtype=np.uint64)
    ordered = masks.canonical_order(X, 4)
    assert [masks.mask_key(m) for m in ordered.tolist()] == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def test_size_blocks_cover_each_subset_once():
    universe = 18  # two label bits above the low table
    for k in (0, 1, 3, 17):
        got = np.concatenate(list(masks.all_of_size(universe, k)))
        assert got.size == comb(universe, k)
        assert np.unique(got).size == got.size
        assert (masks.popcount(got) == k).all()


def test_charge_raises_before_overrun():
    assert masks.charge(10, 5, 15, "x") == 15
    with pytest.raises(BudgetExceeded) as e:
        masks.charge(10, 6, 15, "x")
    assert e.value.needed == 16
    assert e.value.budget == 15


def test_search_dimension_cap():
    masks.check_search_dimension(LtqGraph(6))
    with pytest.raises(DimensionOutOfRange):
        masks.check_search_dimension(LtqGraph(7))


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=2**16 - 1), st.integers(min_value=0, max_value=4))
def test_good_neighbor_kernel_matches_predicate(mask, g):
    G = LtqGraph(4)
    nbr = masks.neighbor_masks(4)
    got = masks.good_neighbor_ok(np.array([mask], dtype=np.uint64), nbr, g, masks.full_mask(4))[0]
    assert bool(got) == is_g_good_neighbor_set(G, VertexSet.from_mask(4, mask), g).is_gng


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=1, max_value=2**16 - 1))
def test_connected_kernel_matches_networkx(mask):
    H = to_networkx(LtqGraph(4))
    members = list(VertexSet.from_mask(4, mask))
    got = masks.connected(np.array([mask], dtype=np.uint64), masks.neighbor_masks(4))[0]
    assert bool(got) == nx.is_connected(H.subgraph(members))


def test_run_blocks_keeps_submission_order():
    args = [(i,) for i in range(5)]
    assert masks.run_blocks(_square, args, workers=2, parallel=True) == [0, 1, 4, 9, 16]


def _square(args):
    return args[0] ** 2
