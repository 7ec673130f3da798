"""PMC and MM* syndromes, consistency, distinguishability and a syndrome decoder.

Two test models:
- PMC: every vertex tests each neighbor. A fault-free tester reports 1 exactly
  when the testee is faulty.
- MM*: every vertex compares every pair of its neighbors. A fault-free
  comparator reports 1 exactly when at least one of the pair is faulty.

Faulty testers and comparators may report anything; a FaultyUnitPolicy pins
that choice down (all 0, all 1, or seeded random) so syndromes are reproducible.

Distinguishability is answered two ways that must agree:
- structurally, from the edges around F1 ^ F2 (`distinguishable_*`)
- semantically, test by test: a pair is jointly consistent when no test has
  its outcome forced to different values by F1 and F2 (`jointly_consistent_*`)
"""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Literal, Mapping, Optional, Tuple, Union

import numpy as np

from ltqdiag.config import FaultyUnitPolicy, Model, PolicyKind
from ltqdiag.errors import DomainMismatch, EqualSets, InvalidBound
from ltqdiag.harness import masks
from ltqdiag.harness.fault_model import check_g, check_space, gng_mask_levels, neighborhood_of_set
from ltqdiag.topology import ltq_graph
from ltqdiag.topology.ltq_graph import LtqGraph, VertexSet, neighbor_labels

__all__ = [
    "FaultyUnitPolicy",
    "PmcSyndrome",
    "MmSyndrome",
    "DiagnosisResult",
    "pmc_tests",
    "mm_tests",
    "pmc_syndrome",
    "mm_syndrome",
    "pmc_consistent",
    "mm_consistent",
    "distinguishable_pmc",
    "distinguishable_mm",
    "jointly_consistent_pmc",
    "jointly_consistent_mm",
    "distinguishable",
    "jointly_consistent",
    "syndrome_for",
    "diagnose",
]

logger = logging.getLogger(__name__)

PmcTest = Tuple[int, int]  # (tester, testee)
MmTest = Tuple[int, int, int]  # (comparator, u, v) with u < v

# ambiguity reports list at most this many candidates
MAX_REPORTED = 64


@lru_cache(maxsize=None)
def _pmc_tests(n: int) -> Tuple[PmcTest, ...]:
    G = LtqGraph(n)
    return tuple(sorted((u, v) for u in range(G.order) for v in neighbor_labels(G, u)))


@lru_cache(maxsize=None)
def _mm_tests(n: int) -> Tuple[MmTest, ...]:
    G = LtqGraph(n)
    out: List[MmTest] = []
    for w in range(G.order):
        nb = sorted(neighbor_labels(G, w))
        for i, u in enumerate(nb):
            for v in nb[i + 1 :]:
                out.append((w, u, v))
    return tuple(out)


def pmc_tests(G: LtqGraph) -> Tuple[PmcTest, ...]:
    """Every ordered adjacent pair, sorted by (tester, testee): 2|E| tests."""
    return _pmc_tests(G.n)


def mm_tests(G: LtqGraph) -> Tuple[MmTest, ...]:
    """Every comparator with every unordered pair of its neighbors, sorted."""
    return _mm_tests(G.n)


@dataclass(frozen=True)
class PmcSyndrome:
    n: int
    outcomes: Mapping[PmcTest, int] = field(default_factory=dict)

    model = Model.PMC

    def __getitem__(self, test: PmcTest) -> int:
        return self.outcomes[test]

    def __len__(self) -> int:
        return len(self.outcomes)

    def with_outcome(self, test: PmcTest, bit: int) -> "PmcSyndrome":
        return PmcSyndrome(self.n, {**self.outcomes, test: int(bit)})

    def rows(self) -> List[Tuple[PmcTest, int]]:
        return sorted(self.outcomes.items())


@dataclass(frozen=True)
class MmSyndrome:
    n: int
    outcomes: Mapping[MmTest, int] = field(default_factory=dict)

    model = Model.MM_STAR

    def __getitem__(self, test: MmTest) -> int:
        return self.outcomes[test]

    def __len__(self) -> int:
        return len(self.outcomes)

    def with_outcome(self, test: MmTest, bit: int) -> "MmSyndrome":
        return MmSyndrome(self.n, {**self.outcomes, test: int(bit)})

    def rows(self) -> List[Tuple[MmTest, int]]:
        return sorted(self.outcomes.items())


Syndrome = Union[PmcSyndrome, MmSyndrome]


class _FreeOutcomes:
    """Outcome source for tests run by faulty units, drawn in test order."""

    def __init__(self, policy: FaultyUnitPolicy) -> None:
        self.kind = PolicyKind(policy.kind)
        self.rng = random.Random(policy.seed)

    def next(self) -> int:
        if self.kind is PolicyKind.ALL_ZERO:
            return 0
        if self.kind is PolicyKind.ALL_ONE:
            return 1
        return self.rng.getrandbits(1)


def pmc_syndrome(G: LtqGraph, F: VertexSet, policy: Optional[FaultyUnitPolicy] = None) -> PmcSyndrome:
    check_space(G, F)
    free = _FreeOutcomes(policy or FaultyUnitPolicy())
    faulty = F.members
    out: Dict[PmcTest, int] = {}
    for u, v in pmc_tests(G):
        out[(u, v)] = free.next() if u in faulty else int(v in faulty)
    return PmcSyndrome(G.n, out)


def mm_syndrome(G: LtqGraph, F: VertexSet, policy: Optional[FaultyUnitPolicy] = None) -> MmSyndrome:
    check_space(G, F)
    free = _FreeOutcomes(policy or FaultyUnitPolicy())
    faulty = F.members
    out: Dict[MmTest, int] = {}
    for w, u, v in mm_tests(G):
        out[(w, u, v)] = free.next() if w in faulty else int(u in faulty or v in faulty)
    return MmSyndrome(G.n, out)


def syndrome_for(model: Model, G: LtqGraph, F: VertexSet, policy: Optional[FaultyUnitPolicy] = None) -> Syndrome:
    if Model(model) is Model.PMC:
        return pmc_syndrome(G, F, policy)
    return mm_syndrome(G, F, policy)


def _check_domain(G: LtqGraph, s: Syndrome, expected: Tuple) -> None:
    if s.n != G.n:
        raise DomainMismatch(f"syndrome is for LTQ_{s.n}, graph is LTQ_{G.n}")
    if len(s.outcomes) != len(expected) or set(s.outcomes) != set(expected):
        raise DomainMismatch(f"{s.model.value} syndrome does not cover exactly the tests of LTQ_{G.n}")
    bad = [k for k, b in s.outcomes.items() if b not in (0, 1)]
    if bad:
        raise DomainMismatch(f"outcome for test {bad[0]} is not 0 or 1")


def pmc_consistent(G: LtqGraph, F: VertexSet, s: PmcSyndrome) -> bool:
    check_space(G, F)
    _check_domain(G, s, pmc_tests(G))
    faulty = F.members
    return all(out == int(v in faulty) for (u, v), out in s.outcomes.items() if u not in faulty)


def mm_consistent(G: LtqGraph, F: VertexSet, s: MmSyndrome) -> bool:
    check_space(G, F)
    _check_domain(G, s, mm_tests(G))
    faulty = F.members
    return all(
        out == int(u in faulty or v in faulty) for (w, u, v), out in s.outcomes.items() if w not in faulty
    )


def _check_pair(G: LtqGraph, F1: VertexSet, F2: VertexSet) -> None:
    check_space(G, F1)
    check_space(G, F2)
    if F1.mask == F2.mask:
        raise EqualSets("a distinguishability question needs two different fault sets")


def distinguishable_pmc(G: LtqGraph, F1: VertexSet, F2: VertexSet) -> bool:
    """Some edge joins a vertex outside F1 | F2 to a vertex of F1 ^ F2."""
    _check_pair(G, F1, F2)
    union = F1 | F2
    if union.mask == VertexSet.full(G.n).mask:
        return False
    diff = F1 ^ F2
    if len(diff) > ltq_graph.SCAN_LIMIT:
        in_union, in_diff = union.packed(), diff.packed()
        for labels in ltq_graph.label_chunks(G):
            hit = ~ltq_graph.bits_at(in_union, labels) & (ltq_graph.neighbor_counts(G, in_diff, labels) > 0)
            if hit.any():
                return True
        return False
    for v in diff:
        if any(w not in union for w in neighbor_labels(G, v)):
            return True
    return False


def distinguishable_mm(G: LtqGraph, F1: VertexSet, F2: VertexSet) -> bool:
    """Any of the three MM* conditions, with R the vertices outside F1 | F2:

    1. some u in R is adjacent to F1 ^ F2 and to another vertex of R
    2. some w in R has two neighbors in F1 - F2
    3. some w in R has two neighbors in F2 - F1
    """
    _check_pair(G, F1, F2)
    union = F1 | F2
    if union.mask == VertexSet.full(G.n).mask:
        return False
    only1, only2 = F1 - F2, F2 - F1
    diff = only1 | only2
    if len(diff) > ltq_graph.SCAN_LIMIT:
        return _distinguishable_mm_bulk(G, union, only1, only2, diff)
    # every condition needs a neighbor in F1 ^ F2
    for u in neighborhood_of_set(G, diff) - union:
        nb = neighbor_labels(G, u)
        if any(w not in union for w in nb):
            return True
        if sum(1 for v in nb if v in only1) >= 2 or sum(1 for v in nb if v in only2) >= 2:
            return True
    return False


def _distinguishable_mm_bulk(
    G: LtqGraph, union: VertexSet, only1: VertexSet, only2: VertexSet, diff: VertexSet
) -> bool:
    in_union, in_1, in_2, in_diff = union.packed(), only1.packed(), only2.packed(), diff.packed()
    for labels in ltq_graph.label_chunks(G):
        outside = ~ltq_graph.bits_at(in_union, labels)
        to_diff = ltq_graph.neighbor_counts(G, in_diff, labels)
        to_rest = G.n - ltq_graph.neighbor_counts(G, in_union, labels)
        c1 = ltq_graph.neighbor_counts(G, in_1, labels)
        c2 = ltq_graph.neighbor_counts(G, in_2, labels)
        if (outside & (((to_diff > 0) & (to_rest > 0)) | (c1 >= 2) | (c2 >= 2))).any():
            return True
    return False


def jointly_consistent_pmc(G: LtqGraph, F1: VertexSet, F2: VertexSet) -> bool:
    """Whether some PMC syndrome is consistent with both sets, decided per test."""
    _check_pair(G, F1, F2)
    a, b = F1.members, F2.members
    for u, v in pmc_tests(G):
        if u in a or u in b:
            continue
        if (v in a) != (v in b):
            return False
    return True


def jointly_consistent_mm(G: LtqGraph, F1: VertexSet, F2: VertexSet) -> bool:
    """Whether some MM* syndrome is consistent with both sets, decided per test."""
    _check_pair(G, F1, F2)
    a, b = F1.members, F2.members
    for w, u, v in mm_tests(G):
        if w in a or w in b:
            continue
        if (u in a or v in a) != (u in b or v in b):
            return False
    return True


def distinguishable(model: Model, G: LtqGraph, F1: VertexSet, F2: VertexSet) -> bool:
    if Model(model) is Model.PMC:
        return distinguishable_pmc(G, F1, F2)
    return distinguishable_mm(G, F1, F2)


def jointly_consistent(model: Model, G: LtqGraph, F1: VertexSet, F2: VertexSet) -> bool:
    if Model(model) is Model.PMC:
        return jointly_consistent_pmc(G, F1, F2)
    return jointly_consistent_mm(G, F1, F2)


Outcome = Literal["unique", "ambiguous", "no_candidate"]


@dataclass
class DiagnosisResult:
    n: int
    model: Model
    g: int
    t: int
    outcome: Outcome
    candidates: List[VertexSet]
    consistent_count: int
    candidates_checked: int
    elapsed: float = 0.0

    @property
    def faulty(self) -> Optional[VertexSet]:
        return self.candidates[0] if self.outcome == "unique" else None

    def to_dict(self) -> dict:
        out = {
            "model": self.model.value,
            "n": self.n,
            "g": self.g,
            "t": self.t,
            "outcome": self.outcome,
        }
        if self.outcome == "unique":
            out["faulty"] = self.candidates[0].labels()
        elif self.outcome == "ambiguous":
            out["candidates"] = [c.labels() for c in self.candidates]
            out["consistent_count"] = self.consistent_count
        out["candidates_checked"] = self.candidates_checked
        return out


def _pmc_consistent_masks(C: np.ndarray, n: int, s: PmcSyndrome) -> np.ndarray:
    nbr = masks.neighbor_masks(n)
    reported = [0] * len(nbr)
    for (u, v), out in s.outcomes.items():
        if out:
            reported[u] |= 1 << v
    ok = np.ones(C.shape, dtype=bool)
    for u in range(len(nbr)):
        ok &= masks.has_bit(C, u) | ((C & nbr[u]) == np.uint64(reported[u]))
    return ok


def _mm_consistent_masks(C: np.ndarray, n: int, s: MmSyndrome) -> np.ndarray:
    ok = np.ones(C.shape, dtype=bool)
    for (w, u, v), out in s.outcomes.items():
        pair = np.uint64((1 << u) | (1 << v))
        ok &= masks.has_bit(C, w) | (((C & pair) != masks.ZERO) == bool(out))
    return ok


def diagnose(
    G: LtqGraph,
    s: Syndrome,
    model: Optional[Model] = None,
    g: int = 1,
    t: int = 0,
    budget: Optional[int] = None,
) -> DiagnosisResult:
    """Every g-good-neighbor fault set of size <= t that could have produced s.

    Candidates are scanned by increasing size, then canonical order, so the
    reported list is the same on every run. Exactly one consistent candidate
    gives outcome "unique".
    """
    model = Model(model) if model is not None else s.model
    if model is not s.model:
        raise DomainMismatch(f"syndrome is {s.model.value}, diagnosis asked for {model.value}")
    check_g(G, g, G.n)
    if t < 0:
        raise InvalidBound(f"t must be >= 0, got {t}")
    _check_domain(G, s, pmc_tests(G) if model is Model.PMC else mm_tests(G))

    t0 = time.time()
    levels = gng_mask_levels(G, g, t, budget)
    found: List[int] = []
    consistent = 0
    checked = 0
    for k, C in enumerate(levels):
        checked += int(C.size)
        if C.size == 0:
            continue
        if model is Model.PMC:
            hit = C[_pmc_consistent_masks(C, G.n, s)]
        else:
            hit = C[_mm_consistent_masks(C, G.n, s)]
        consistent += int(hit.size)
        room = MAX_REPORTED - len(found)
        if room > 0:
            found.extend(int(m) for m in hit[:room])
        logger.debug("diagnose LTQ_%d size=%d candidates=%d consistent=%d", G.n, k, C.size, hit.size)

    if consistent == 0:
        outcome: Outcome = "no_candidate"
    elif consistent == 1:
        outcome = "unique"
    else:
        outcome = "ambiguous"
    logger.info("diagnose LTQ_%d %s g=%d t=%d: %s (%d consistent)", G.n, model.value, g, t, outcome, consistent)
    return DiagnosisResult(
        n=G.n,
        model=model,
        g=g,
        t=t,
        outcome=outcome,
        candidates=[VertexSet.from_mask(G.n, m) for m in found],
        consistent_count=consistent,
        candidates_checked=checked,
        elapsed=time.time() - t0,
    )

