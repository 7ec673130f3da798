"""Locally twisted cube LTQ_n: construction, adjacency and structural invariants.

Goal: keep the graph math as pure functions over an immutable graph value so the
fault model, the syndrome simulator and the solvers all share one adjacency.

Labels are integers; bit i holds u_i of the string u_{n-1}...u_1u_0 (u_0 is the
least significant bit). `format_label` prints most-significant bit first, which
is the order the labels are written in by hand.

Production adjacency is the non-recursive rule set:
- dimension 0 or 1: flip that bit
- dimension k >= 2: flip bit k, and also flip bit k-1 when u_0 = 1

`neighbors_recursive` rebuilds the same neighborhoods from the copy-and-connect
construction (LTQ_2 is the 4-cycle; LTQ_n joins two prefixed copies of
LTQ_{n-1}). It exists only as a cross-check oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple, Union

import networkx as nx
import numpy as np

from ltqdiag.errors import DimensionOutOfRange, FormatError, InvalidVertex, SameVertex


MIN_DIMENSION = 2
MAX_DIMENSION = 30
# 2^20 x 20 uint32 entries ~ 80 MB; larger graphs compute neighborhoods on demand.
TABLE_MAX_DIMENSION = 20
# Sets with more members than this are scanned with numpy, a chunk of labels at a time.
SCAN_LIMIT = 1 << 12
CHUNK_LABELS = 1 << 20
SMALL_MASK_BITS = 1 << 12

VertexId = int

LTQ2_EDGES: Tuple[Tuple[int, int], ...] = ((0b00, 0b01), (0b01, 0b11), (0b11, 0b10), (0b10, 0b00))


def format_label(v: VertexId, n: int) -> str:
    return format(v, f"0{n}b")


def parse_label(text: str, n: int) -> VertexId:
    s = text.strip()
    if len(s) != n or any(ch not in "01" for ch in s):
        raise FormatError(f"label {text!r} is not a {n}-bit binary string")
    return int(s, 2)


def _check_dimension(n: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or not MIN_DIMENSION <= n <= MAX_DIMENSION:
        raise DimensionOutOfRange(f"dimension must be in [{MIN_DIMENSION}, {MAX_DIMENSION}], got {n!r}")


@dataclass(frozen=True, init=False)
class VertexSet:
    """A set of vertices of LTQ_n (fault sets, cuts, neighborhoods).

    Stored as one integer bitmask over the 2^n labels (bit v set iff v is a
    member), so half cubes and complements stay cheap at large n. Iteration and
    serialization are always in ascending label order.
    """

    n: int
    mask: int

    def __init__(self, n: int, members: Iterable[int] = ()) -> None:
        limit = 1 << n
        m = 0
        for v in members:
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or not 0 <= v < limit:
                raise InvalidVertex(f"vertex {v!r} outside [0, 2^{n})")
            m |= 1 << int(v)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "mask", m)

    @classmethod
    def _raw(cls, n: int, mask: int) -> "VertexSet":
        out = cls.__new__(cls)
        object.__setattr__(out, "n", n)
        object.__setattr__(out, "mask", mask)
        return out

    @classmethod
    def of(cls, n: int, vertices: Iterable[Union[int, str]] = ()) -> "VertexSet":
        return cls(n, [parse_label(v, n) if isinstance(v, str) else int(v) for v in vertices])

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "VertexSet":
        m = int(mask)
        if m < 0 or m.bit_length() > (1 << n):
            raise InvalidVertex(f"mask has bits outside [0, 2^{n})")
        return cls._raw(n, m)

    @classmethod
    def full(cls, n: int) -> "VertexSet":
        return cls._raw(n, (1 << (1 << n)) - 1)

    @cached_property
    def members(self) -> FrozenSet[int]:
        return frozenset(self)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[int]:
        m = self.mask
        if m.bit_length() <= SMALL_MASK_BITS:
            while m:
                low = m & -m
                yield low.bit_length() - 1
                m ^= low
            return
        for arr in self.member_arrays():
            yield from arr.tolist()

    def __contains__(self, v: object) -> bool:
        if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or not 0 <= v < (1 << self.n):
            return False
        return bool((self.mask >> int(v)) & 1)

    def packed(self) -> np.ndarray:
        """Membership bits as uint8 bytes, label v at bit v % 8 of byte v // 8."""
        size = max(1, (1 << self.n) // 8)
        return np.frombuffer(self.mask.to_bytes(size, "little"), dtype=np.uint8)

    def member_arrays(self, chunk: int = CHUNK_LABELS) -> Iterator[np.ndarray]:
        """Members in ascending order, a numpy array per `chunk` labels."""
        packed = self.packed()
        step = max(1, chunk // 8)
        for start in range(0, packed.size, step):
            bits = np.unpackbits(packed[start : start + step], bitorder="little")
            hits = np.flatnonzero(bits)
            if hits.size:
                yield hits + start * 8

    def _same_space(self, other: "VertexSet") -> None:
        if other.n != self.n:
            raise InvalidVertex(f"cannot combine vertex sets of LTQ_{self.n} and LTQ_{other.n}")

    def __or__(self, other: "VertexSet") -> "VertexSet":
        self._same_space(other)
        return VertexSet._raw(self.n, self.mask | other.mask)

    def __and__(self, other: "VertexSet") -> "VertexSet":
        self._same_space(other)
        return VertexSet._raw(self.n, self.mask & other.mask)

    def __sub__(self, other: "VertexSet") -> "VertexSet":
        self._same_space(other)
        return VertexSet._raw(self.n, self.mask & ~other.mask)

    def __xor__(self, other: "VertexSet") -> "VertexSet":
        self._same_space(other)
        return VertexSet._raw(self.n, self.mask ^ other.mask)

    def complement(self) -> "VertexSet":
        return VertexSet._raw(self.n, self.mask ^ ((1 << (1 << self.n)) - 1))

    def is_empty(self) -> bool:
        return self.mask == 0

    def canonical_key(self) -> Tuple[int, ...]:
        return tuple(self)

    def labels(self) -> List[str]:
        return [format_label(v, self.n) for v in self]

    def __repr__(self) -> str:
        return f"VertexSet(n={self.n}, {{{', '.join(self.labels())}}})"


def label_chunks(G: "LtqGraph", chunk: int = CHUNK_LABELS) -> Iterator[np.ndarray]:
    for start in range(0, G.order, chunk):
        yield np.arange(start, min(start + chunk, G.order), dtype=np.int64)


def bits_at(packed: np.ndarray, labels: np.ndarray) -> np.ndarray:
    return ((packed[labels >> 3] >> (labels & 7)) & 1).astype(bool)


def dimension_neighbors(labels: np.ndarray, k: int) -> np.ndarray:
    """dimension_neighbor applied to a whole label array."""
    if k < 2:
        return labels ^ (1 << k)
    return labels ^ (1 << k) ^ ((labels & 1) << (k - 1))


def neighbor_counts(G: "LtqGraph", packed: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """For each label, how many of its neighbors are in the packed set."""
    count = np.zeros(labels.shape, dtype=np.int64)
    for k in range(G.n):
        count += bits_at(packed, dimension_neighbors(labels, k))
    return count


def dimension_neighbor(v: VertexId, k: int) -> VertexId:
    """Neighbor of v across dimension k."""
    if k < 2:
        return v ^ (1 << k)
    return v ^ (1 << k) ^ ((v & 1) << (k - 1))


@dataclass(frozen=True)
class LtqGraph:
    n: int

    def __post_init__(self) -> None:
        _check_dimension(self.n)

    @property
    def order(self) -> int:
        return 1 << self.n

    @cached_property
    def neighbor_table(self) -> Optional[np.ndarray]:
        """Row v lists the neighbor of v across dimensions 0..n-1 (n <= 20 only)."""
        if self.n > TABLE_MAX_DIMENSION:
            return None
        labels = np.arange(self.order, dtype=np.uint32)
        low = labels & np.uint32(1)
        cols = []
        for k in range(self.n):
            if k < 2:
                cols.append(labels ^ np.uint32(1 << k))
            else:
                cols.append(labels ^ np.uint32(1 << k) ^ (low << np.uint32(k - 1)))
        table = np.stack(cols, axis=1)
        table.setflags(write=False)
        return table

    def check_vertex(self, v: VertexId) -> None:
        if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or not 0 <= int(v) < self.order:
            raise InvalidVertex(f"vertex {v!r} is not a label of LTQ_{self.n}")

    def vertex_set(self, vertices: Iterable[Union[int, str]] = ()) -> VertexSet:
        return VertexSet.of(self.n, vertices)


def build(n: int) -> LtqGraph:
    return LtqGraph(n)


def neighbor_labels(G: LtqGraph, v: VertexId) -> Tuple[int, ...]:
    """Neighbors of v ordered by dimension (no validation; hot path)."""
    table = G.neighbor_table
    if table is not None:
        return tuple(int(w) for w in table[v])
    return tuple(dimension_neighbor(v, k) for k in range(G.n))


def neighbors(G: LtqGraph, v: VertexId) -> VertexSet:
    G.check_vertex(v)
    return VertexSet(G.n, frozenset(neighbor_labels(G, int(v))))


def adjacent(G: LtqGraph, u: VertexId, v: VertexId) -> bool:
    G.check_vertex(u)
    G.check_vertex(v)
    if u == v:
        return False
    return any(dimension_neighbor(int(u), k) == v for k in range(G.n))


@lru_cache(maxsize=None)
def _ltq2_adjacency() -> Dict[int, FrozenSet[int]]:
    adj: Dict[int, set] = {v: set() for v in range(4)}
    for a, b in LTQ2_EDGES:
        adj[a].add(b)
        adj[b].add(a)
    return {v: frozenset(ws) for v, ws in adj.items()}


def _recursive_neighbors(n: int, v: int) -> FrozenSet[int]:
    if n == 2:
        return _ltq2_adjacency()[v]
    top = 1 << (n - 1)
    prefix = v & top
    low = v & (top - 1)
    inside = {prefix | w for w in _recursive_neighbors(n - 1, low)}
    # 0 x_{n-2} ... x_0  <->  1 (x_{n-2} xor x_0) x_{n-3} ... x_0
    partner = (v ^ top) ^ ((low & 1) << (n - 2))
    inside.add(partner)
    return frozenset(inside)


def neighbors_recursive(G: LtqGraph, v: VertexId) -> VertexSet:
    G.check_vertex(v)
    return VertexSet(G.n, _recursive_neighbors(G.n, int(v)))


def common_neighbors(G: LtqGraph, u: VertexId, v: VertexId) -> VertexSet:
    G.check_vertex(u)
    G.check_vertex(v)
    if u == v:
        raise SameVertex(f"common_neighbors needs two distinct vertices, got {u} twice")
    shared = set(neighbor_labels(G, int(u))) & set(neighbor_labels(G, int(v)))
    return VertexSet(G.n, frozenset(shared))


def has_triangle(G: LtqGraph) -> bool:
    table = G.neighbor_table
    if table is not None:
        # a triangle u-a-b exists iff for some pair of dimensions (i, j) and some k,
        # the k-neighbor of a equals b
        n = G.n
        for i in range(n):
            a = table[:, i]
            for j in range(i + 1, n):
                b = table[:, j]
                for k in range(n):
                    if np.any(table[a, k] == b):
                        return True
        return False

    for u in range(G.order):
        nb = neighbor_labels(G, u)
        for i, a in enumerate(nb):
            around_a = set(neighbor_labels(G, a))
            for b in nb[i + 1 :]:
                if b in around_a:
                    return True
    return False


def edges(G: LtqGraph) -> List[Tuple[int, int]]:
    """Undirected edge list (u < v), sorted."""
    out: List[Tuple[int, int]] = []
    for u in range(G.order):
        for w in neighbor_labels(G, u):
            if u < w:
                out.append((u, w))
    out.sort()
    return out


def half_cube(G: LtqGraph, bit: int) -> VertexSet:
    """V(LTQ_{n-1}^bit): the vertices whose top label bit equals `bit`."""
    if bit not in (0, 1):
        raise InvalidVertex(f"half-cube selector must be 0 or 1, got {bit!r}")
    top = 1 << (G.n - 1)
    start = top if bit else 0
    return VertexSet.from_mask(G.n, ((1 << top) - 1) << start)


def to_networkx(G: LtqGraph) -> nx.Graph:
    H = nx.Graph(name=f"LTQ_{G.n}")
    H.add_nodes_from(range(G.order))
    H.add_edges_from(edges(G))
    return H
