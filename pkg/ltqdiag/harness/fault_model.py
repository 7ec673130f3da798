"""Fault-set predicates and searches on LTQ_n.

This module answers the structural questions the diagnosability solvers lean on:
- is F a g-good-neighbor conditional faulty set (every fault-free vertex keeps
  at least g fault-free neighbors)?
- what are the components of G - F, and does F cut G?
- how small can a g-good-neighbor cut be (kappa^g), by bounded exhaustive search?
- does any small vertex set induce minimum degree >= g?

The predicates take VertexSet values and work for any supported n. The two
searches enumerate uint64 masks (see masks.py) and are limited to n <= 6.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import List, Optional, Tuple

import numpy as np

from ltqdiag.config import resolve_budget
from ltqdiag.errors import EmptySet, GOutOfRange, InvalidBound, InvalidVertex
from ltqdiag.harness import masks
from ltqdiag.topology import ltq_graph
from ltqdiag.topology.ltq_graph import LtqGraph, VertexSet, format_label, neighbor_labels

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GoodNeighborReport:
    is_gng: bool
    violating_vertex: Optional[int] = None
    free_neighbor_count: Optional[int] = None

    def to_dict(self, n: int) -> dict:
        return {
            "is_gng": self.is_gng,
            "violating_vertex": None if self.violating_vertex is None else format_label(self.violating_vertex, n),
            "free_neighbor_count": self.free_neighbor_count,
        }


@dataclass
class CutReport:
    size: int
    cut: VertexSet
    component_count: int
    component_sizes: List[int]
    found: bool = True
    bound: Optional[int] = None
    candidates_checked: int = 0
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        return {
            "size": self.size,
            "cut": self.cut.labels(),
            "component_sizes": list(self.component_sizes),
        }


def check_g(G: LtqGraph, g: int, upper: int) -> None:
    if not isinstance(g, int) or not 0 <= g <= upper:
        raise GOutOfRange(f"g must be in [0, {upper}] for LTQ_{G.n}, got {g!r}")


def check_space(G: LtqGraph, S: VertexSet) -> None:
    if S.n != G.n:
        raise InvalidVertex(f"vertex set belongs to LTQ_{S.n}, graph is LTQ_{G.n}")


def neighborhood_of_set(G: LtqGraph, A: VertexSet) -> VertexSet:
    """N(A): every vertex adjacent to A, minus A itself."""
    check_space(G, A)
    if A.is_empty():
        raise EmptySet("neighborhood_of_set needs a nonempty set")
    if len(A) > ltq_graph.SCAN_LIMIT:
        return _neighborhood_bulk(G, A)
    out = 0
    for v in A:
        for w in neighbor_labels(G, v):
            out |= 1 << w
    return VertexSet.from_mask(G.n, out & ~A.mask)


def _neighborhood_bulk(G: LtqGraph, A: VertexSet) -> VertexSet:
    packed = A.packed()
    out = 0
    for labels in ltq_graph.label_chunks(G):
        hit = (ltq_graph.neighbor_counts(G, packed, labels) > 0) & ~ltq_graph.bits_at(packed, labels)
        for v in labels[hit].tolist():
            out |= 1 << v
    return VertexSet.from_mask(G.n, out)


def _first_short_vertex(G: LtqGraph, F: VertexSet, need: int) -> Optional[Tuple[int, int]]:
    """Smallest fault-free label with fewer than `need` fault-free neighbors, with that count."""
    packed = F.packed()
    for labels in ltq_graph.label_chunks(G):
        free = G.n - ltq_graph.neighbor_counts(G, packed, labels)
        bad = np.flatnonzero(~ltq_graph.bits_at(packed, labels) & (free < need))
        if bad.size:
            i = int(bad[0])
            return int(labels[i]), int(free[i])
    return None


def is_g_good_neighbor_set(G: LtqGraph, F: VertexSet, g: int) -> GoodNeighborReport:
    """Every fault-free vertex must keep at least g fault-free neighbors.

    Only N(F) can lose neighbors, so only N(F) is scanned, in ascending label
    order; the reported vertex is the smallest violator.
    """
    check_space(G, F)
    check_g(G, g, G.n)
    if F.is_empty() or g == 0:
        return GoodNeighborReport(True)
    if len(F) > ltq_graph.SCAN_LIMIT:
        hit = _first_short_vertex(G, F, g)
        return GoodNeighborReport(True) if hit is None else GoodNeighborReport(False, *hit)
    for v in neighborhood_of_set(G, F):
        free = sum(1 for w in neighbor_labels(G, v) if w not in F)
        if free < g:
            return GoodNeighborReport(False, v, free)
    return GoodNeighborReport(True)


def is_conditional_faulty_set(G: LtqGraph, F: VertexSet) -> GoodNeighborReport:
    """F must not contain the whole neighborhood of any vertex (faulty or not)."""
    check_space(G, F)
    if len(F) < G.n:
        return GoodNeighborReport(True)
    if len(F) > ltq_graph.SCAN_LIMIT:
        packed = F.packed()
        for labels in ltq_graph.label_chunks(G):
            hit = np.flatnonzero(ltq_graph.neighbor_counts(G, packed, labels) == G.n)
            if hit.size:
                return GoodNeighborReport(False, int(labels[hit[0]]), 0)
        return GoodNeighborReport(True)
    # any vertex whose neighborhood lies in F is adjacent to F
    candidates = neighborhood_of_set(G, F) | F
    for v in candidates:
        if all(w in F for w in neighbor_labels(G, v)):
            return GoodNeighborReport(False, v, 0)
    return GoodNeighborReport(True)


def components(G: LtqGraph, F: VertexSet) -> List[VertexSet]:
    """Components of G - F, ordered by (size, smallest label)."""
    check_space(G, F)
    seen = set(F)
    parts: List[Tuple[int, int, List[int]]] = []
    for start in range(G.order):
        if start in seen:
            continue
        seen.add(start)
        comp = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in neighbor_labels(G, u):
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        parts.append((len(comp), start, comp))
    parts.sort(key=lambda p: (p[0], p[1]))
    return [VertexSet(G.n, members) for _, _, members in parts]


def is_cut(G: LtqGraph, F: VertexSet) -> CutReport:
    comps = components(G, F)
    return CutReport(
        size=len(F),
        cut=F,
        component_count=len(comps),
        component_sizes=[len(c) for c in comps],
        found=len(comps) >= 2,
    )


def _kappa_block(args: Tuple) -> Optional[int]:
    n, g, block = args
    nbr = masks.neighbor_masks(n)
    full = masks.full_mask(n)
    best: Optional[int] = None
    for X in masks.block_masks(len(nbr), block):
        cand = X[masks.good_neighbor_ok(X, nbr, g, full)]
        if cand.size == 0:
            continue
        cand = cand[masks.disconnects(cand, nbr, full)]
        if cand.size == 0:
            continue
        m = min(cand.tolist(), key=masks.mask_key)
        if best is None or masks.mask_key(m) < masks.mask_key(best):
            best = m
    return best


def kappa_g(
    G: LtqGraph,
    g: int,
    size_bound: int,
    budget: Optional[int] = None,
    workers: int = 1,
) -> CutReport:
    """Smallest g-good-neighbor cut with at most size_bound vertices.

    Sizes are tried in increasing order; the first size with any cut is scanned
    completely and the canonically smallest cut is returned. If no size up to
    the bound admits a cut the report has found=False.
    """
    check_g(G, g, G.n - 2)
    if size_bound < 1:
        raise InvalidBound(f"size_bound must be >= 1, got {size_bound}")
    masks.check_search_dimension(G)
    budget = resolve_budget(budget)
    universe = G.order
    t0 = time.time()
    spent = 0

    for k in range(1, min(size_bound, universe) + 1):
        level = comb(universe, k)
        spent = masks.charge(spent, level, budget, f"kappa^{g}(LTQ_{G.n}) up to size {size_bound}")
        args = [(G.n, g, block) for block in masks.size_blocks(universe, k)]
        results = masks.run_blocks(_kappa_block, args, workers, parallel=level >= masks.PARALLEL_MIN_CANDIDATES)
        hits = [r for r in results if r is not None]
        logger.info("kappa^%d LTQ_%d size=%d candidates=%d hits=%d", g, G.n, k, level, len(hits))
        if hits:
            best = min(hits, key=masks.mask_key)
            report = is_cut(G, VertexSet.from_mask(G.n, best))
            report.bound = size_bound
            report.candidates_checked = spent
            report.elapsed = time.time() - t0
            return report

    return CutReport(
        size=0,
        cut=VertexSet(G.n),
        component_count=1,
        component_sizes=[universe],
        found=False,
        bound=size_bound,
        candidates_checked=spent,
        elapsed=time.time() - t0,
    )


def _dense_block(args: Tuple) -> bool:
    n, g, block = args
    nbr = masks.neighbor_masks(n)
    for S in masks.block_masks(len(nbr), block):
        if masks.min_degree_ok(S, nbr, g).any():
            return True
    return False


def verify_min_subgraph_order(
    G: LtqGraph,
    g: int,
    order_bound: int,
    budget: Optional[int] = None,
    workers: int = 1,
) -> bool:
    """True iff no vertex set of size < order_bound induces minimum degree >= g."""
    check_g(G, g, G.n)
    if order_bound > (1 << g):
        raise InvalidBound(f"order_bound must be <= 2^g = {1 << g}, got {order_bound}")
    masks.check_search_dimension(G)
    budget = resolve_budget(budget)
    universe = G.order
    spent = 0
    for k in range(1, min(order_bound - 1, universe) + 1):
        level = comb(universe, k)
        spent = masks.charge(spent, level, budget, f"min-degree-{g} subgraphs of LTQ_{G.n} below order {order_bound}")
        args = [(G.n, g, block) for block in masks.size_blocks(universe, k)]
        if any(masks.run_blocks(_dense_block, args, workers, parallel=level >= masks.PARALLEL_MIN_CANDIDATES)):
            logger.info("LTQ_%d: a %d-vertex subgraph has minimum degree >= %d", G.n, k, g)
            return False
    return True


@lru_cache(maxsize=32)
def cached_gng_levels(n: int, g: int, max_size: int) -> Tuple[np.ndarray, ...]:
    nbr = masks.neighbor_masks(n)
    full = masks.full_mask(n)
    universe = len(nbr)
    levels = []
    for k in range(max_size + 1):
        parts = [X[masks.good_neighbor_ok(X, nbr, g, full)] for X in masks.all_of_size(universe, k)]
        arr = np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint64)
        arr = masks.canonical_order(arr, universe)
        arr.setflags(write=False)
        levels.append(arr)
    return tuple(levels)


def gng_mask_levels(
    G: LtqGraph,
    g: int,
    max_size: int,
    budget: Optional[int] = None,
) -> Tuple[np.ndarray, ...]:
    """g-good-neighbor faulty sets as uint64 masks, one canonically sorted array per size 0..max_size."""
    check_g(G, g, G.n)
    if max_size < 0:
        raise InvalidBound(f"max_size must be >= 0, got {max_size}")
    masks.check_search_dimension(G)
    max_size = min(max_size, G.order)
    masks.charge(0, masks.count_subsets(G.order, max_size), resolve_budget(budget), f"{g}-good-neighbor sets of LTQ_{G.n} up to size {max_size}")
    return cached_gng_levels(G.n, g, max_size)
