"""Bit-parallel kernels for the exhaustive searches.

A candidate vertex set is one uint64 mask over the 2^n labels, so these kernels
cover n <= 6. Every kernel takes a whole numpy array of candidates and returns
an array, which keeps the per-candidate Python overhead out of the inner loops.

Subsets of a fixed size are produced in blocks: the low 16 label bits come from
a precomputed popcount table and the remaining high bits from
itertools.combinations. A block (k, j, his) is small and picklable, so the same
blocks drive both the sequential loop and the process pool.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from itertools import combinations, islice
from math import comb
from typing import Callable, Iterator, List, Sequence, Tuple, TypeVar

import numpy as np

from ltqdiag.errors import BudgetExceeded, DimensionOutOfRange
from ltqdiag.topology.ltq_graph import LtqGraph, neighbor_labels

logger = logging.getLogger(__name__)

SEARCH_MAX_DIMENSION = 6
LOW_BITS = 16
# hi-combinations handed to one worker task
BLOCK_HIS = 256
# below this many candidates a level runs in-process even when workers > 1
PARALLEL_MIN_CANDIDATES = 2_000_000

ONE = np.uint64(1)
ZERO = np.uint64(0)

Block = Tuple[int, int, Tuple[int, ...]]
R = TypeVar("R")


def check_search_dimension(G: LtqGraph) -> None:
    if G.n > SEARCH_MAX_DIMENSION:
        raise DimensionOutOfRange(
            f"exhaustive search supports n <= {SEARCH_MAX_DIMENSION} (uint64 masks), got n={G.n}"
        )


@lru_cache(maxsize=None)
def neighbor_masks(n: int) -> np.ndarray:
    G = LtqGraph(n)
    out = np.zeros(G.order, dtype=np.uint64)
    for v in range(G.order):
        m = 0
        for w in neighbor_labels(G, v):
            m |= 1 << w
        out[v] = m
    out.setflags(write=False)
    return out


def full_mask(n: int) -> np.uint64:
    return np.uint64((1 << (1 << n)) - 1)


def has_bit(X: np.ndarray, v: int) -> np.ndarray:
    return ((X >> np.uint64(v)) & ONE).astype(bool)


def popcount(X: np.ndarray) -> np.ndarray:
    return np.bitwise_count(X)


def expand(X: np.ndarray, nbr: np.ndarray) -> np.ndarray:
    """Union of the neighborhoods of every set in X (members of X may be included)."""
    out = np.zeros_like(X)
    for v in range(len(nbr)):
        out |= np.where(has_bit(X, v), nbr[v], ZERO)
    return out


def good_neighbor_ok(F: np.ndarray, nbr: np.ndarray, g: int, full: np.uint64) -> np.ndarray:
    """True where every vertex outside F keeps >= g neighbors outside F."""
    free = ~F & full
    ok = np.ones(F.shape, dtype=bool)
    if g == 0:
        return ok
    for v in range(len(nbr)):
        ok &= has_bit(F, v) | (popcount(free & nbr[v]) >= g)
    return ok


def min_degree_ok(S: np.ndarray, nbr: np.ndarray, g: int) -> np.ndarray:
    """True where the subgraph induced by S has minimum degree >= g."""
    ok = S != ZERO
    for v in range(len(nbr)):
        ok &= ~has_bit(S, v) | (popcount(S & nbr[v]) >= g)
    return ok


def connected(S: np.ndarray, nbr: np.ndarray) -> np.ndarray:
    """True where S is nonempty and induces a connected subgraph."""
    reach = S & (~S + ONE)
    while True:
        nxt = (reach | expand(reach, nbr)) & S
        if np.array_equal(nxt, reach):
            break
        reach = nxt
    return (S != ZERO) & (reach == S)


def disconnects(F: np.ndarray, nbr: np.ndarray, full: np.uint64) -> np.ndarray:
    rest = ~F & full
    return (rest != ZERO) & ~connected(rest, nbr)


def mask_key(mask: int) -> Tuple[int, ...]:
    out = []
    m = int(mask)
    while m:
        low = m & -m
        out.append(low.bit_length() - 1)
        m ^= low
    return tuple(out)


def canonical_sorted(masks: Sequence[int]) -> List[int]:
    return sorted((int(m) for m in masks), key=mask_key)


def reverse_bits(X: np.ndarray, width: int) -> np.ndarray:
    out = np.zeros_like(X)
    for i in range(width):
        out |= ((X >> np.uint64(i)) & ONE) << np.uint64(width - 1 - i)
    return out


def canonical_order(X: np.ndarray, universe: int) -> np.ndarray:
    """Sort equal-size sets by their ascending member lists.

    For two sets of the same size the smallest label in their symmetric
    difference decides, which is the highest differing bit once the bit order
    is reversed; so canonical ascending is bit-reversed descending.
    """
    rev = reverse_bits(X, universe)
    return X[np.argsort(rev, kind="stable")[::-1]]


def count_subsets(universe: int, max_size: int, min_size: int = 0) -> int:
    return sum(comb(universe, k) for k in range(min_size, max_size + 1))


def charge(spent: int, extra: int, budget: int, what: str) -> int:
    """Add `extra` candidates to the running total or raise before doing the work."""
    total = spent + extra
    if total > budget:
        raise BudgetExceeded(
            f"{what} needs {total} candidate subsets, budget is {budget}", needed=total, budget=budget
        )
    return total


@lru_cache(maxsize=None)
def _low_by_popcount(low_bits: int) -> Tuple[np.ndarray, ...]:
    all_low = np.arange(1 << low_bits, dtype=np.uint64)
    pc = popcount(all_low)
    return tuple(all_low[pc == c] for c in range(low_bits + 1))


def _split(universe: int) -> Tuple[int, int]:
    low = min(universe, LOW_BITS)
    return low, universe - low


def size_blocks(universe: int, k: int, his_per_block: int = BLOCK_HIS) -> Iterator[Block]:
    """Blocks that together cover every k-subset of `universe` labels exactly once."""
    low, high = _split(universe)
    for j in range(max(0, k - low), min(k, high) + 1):
        it = combinations(range(high), j)
        while True:
            chunk = list(islice(it, his_per_block))
            if not chunk:
                break
            his = tuple(sum(1 << (low + b) for b in c) for c in chunk)
            yield (k, j, his)


def block_masks(universe: int, block: Block) -> Iterator[np.ndarray]:
    k, j, his = block
    low, _ = _split(universe)
    lo = _low_by_popcount(low)[k - j]
    for hi in his:
        yield lo | np.uint64(hi)


def all_of_size(universe: int, k: int) -> Iterator[np.ndarray]:
    for block in size_blocks(universe, k):
        yield from block_masks(universe, block)


def run_blocks(
    fn: Callable[[Tuple], R],
    args: Sequence[Tuple],
    workers: int,
    parallel: bool,
) -> List[R]:
    """Apply fn to every argument tuple; results come back in submission order."""
    if workers <= 1 or not parallel or len(args) <= 1:
        return [fn(a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args, chunksize=1))
