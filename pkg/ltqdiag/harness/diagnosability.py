"""g-good-neighbor conditional diagnosability t_g of LTQ_n.

Three ways to get a number:
- formula: 2^g(n-g+1)-1 for 1 <= g <= n-3, 2^(n-1)-1 for n-2 <= g <= n-1
  (PMC from n=4, MM* from n=5)
- witness: an explicit indistinguishable pair of g-good-neighbor sets; the
  larger set's size minus one is an upper bound on t_g
- brute force: every unordered pair of g-good-neighbor sets up to a size bound,
  level by level on max(|F1|, |F2|); the first level holding an
  indistinguishable pair gives t_g exactly

The brute force is exact for n = 4. For n >= 5 `verify_theorem` certifies the
upper bound with the witness and checks the lower-bound ingredients (kappa^g
and the minimum order of a min-degree-g subgraph) as far as the budget allows.

The half-cube witness is used for g >= n-2; that is the range the half-cube
argument actually covers, even though it is sometimes stated as 1 <= g <= n-3.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Any, Dict, Iterator, List, Literal, Optional, Sequence, Tuple

import numpy as np

from ltqdiag.config import Model, resolve_pair_budget
from ltqdiag.errors import BudgetExceeded, DimensionOutOfRange, DomainMismatch, GOutOfRange, InvalidBound, OutOfTheoremRange
from ltqdiag.harness import masks
from ltqdiag.harness.diagnosis import distinguishable
from ltqdiag.harness.fault_model import (
    cached_gng_levels,
    check_g,
    gng_mask_levels,
    is_g_good_neighbor_set,
    kappa_g,
    neighborhood_of_set,
    verify_min_subgraph_order,
)
from ltqdiag.topology.ltq_graph import LtqGraph, VertexSet, half_cube
from ltqdiag.topology.patterns import block_pattern, expand_pattern

logger = logging.getLogger(__name__)

Method = Literal["formula", "brute_force", "witness"]

# below this many vertices the pair kernels use full 2^order lookup tables
TABLE_MAX_ORDER = 16
# chunks per worker when a level is split across processes
CHUNKS_PER_WORKER = 4
# larger witness sets are reported by size only
WITNESS_LABEL_LIMIT = 4096

Pair = Tuple[VertexSet, VertexSet]
PairKey = Tuple[int, int, Tuple[int, ...], Tuple[int, ...]]


@dataclass
class DiagReport:
    n: int
    g: int
    model: Model
    method: Method
    value: int
    exact: bool = False
    witness_pair: Optional[Pair] = None
    pairs_checked: int = 0
    elapsed: float = 0.0
    checks: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "n": self.n,
            "g": self.g,
            "model": Model(self.model).value,
            "method": self.method,
            "value": self.value,
            "exact": self.exact,
            "witness": None if self.witness_pair is None else [_witness_entry(s) for s in self.witness_pair],
            "pairs_checked": self.pairs_checked,
            "elapsed_ms": int(round(self.elapsed * 1000)) if timing else 0,
        }
        if self.checks:
            out["checks"] = dict(self.checks)
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _witness_entry(S: VertexSet) -> Any:
    if len(S) > WITNESS_LABEL_LIMIT:
        return {"size": len(S)}
    return S.labels()


def in_theorem_range(n: int, g: int, model: Model) -> bool:
    min_n = 4 if Model(model) is Model.PMC else 5
    return n >= min_n and 1 <= g <= n - 1


def tg_formula(n: int, g: int, model: Model) -> int:
    if not in_theorem_range(n, g, model):
        min_n = 4 if Model(model) is Model.PMC else 5
        raise OutOfTheoremRange(
            f"closed form holds for n >= {min_n}, 1 <= g <= n-1 under {Model(model).value}; got n={n}, g={g}"
        )
    if g <= n - 3:
        return (1 << g) * (n - g + 1) - 1
    return (1 << (n - 1)) - 1


def kappa_formula(n: int, g: int) -> int:
    return (1 << g) * (n - g)


def formula_report(n: int, g: int, model: Model) -> DiagReport:
    return DiagReport(n=n, g=g, model=Model(model), method="formula", value=tg_formula(n, g, model))


def witness_pair(G: LtqGraph, g: int) -> Pair:
    """Indistinguishable pair of g-good-neighbor sets.

    g <= n-3: A = 0^(n-g-1) X^g 0 is a g-cube, F1 = N(A), F2 = N(A) | A.
    g >= n-2: the two half cubes split on the top label bit.
    """
    if not isinstance(g, int) or not 1 <= g <= G.n - 1:
        raise GOutOfRange(f"witness needs 1 <= g <= n-1 = {G.n - 1}, got {g!r}")
    if g <= G.n - 3:
        A = expand_pattern(block_pattern(G.n, g))
        F1 = neighborhood_of_set(G, A)
        return F1, F1 | A
    return half_cube(G, 0), half_cube(G, 1)


def witness_report(G: LtqGraph, g: int, model: Model) -> DiagReport:
    t0 = time.time()
    model = Model(model)
    F1, F2 = witness_pair(G, g)
    ok1 = is_g_good_neighbor_set(G, F1, g).is_gng
    ok2 = is_g_good_neighbor_set(G, F2, g).is_gng
    indist = not distinguishable(model, G, F1, F2)
    report = DiagReport(
        n=G.n,
        g=g,
        model=model,
        method="witness",
        value=max(len(F1), len(F2)) - 1,
        witness_pair=(F1, F2),
        pairs_checked=1,
        checks={"F1_gng": ok1, "F2_gng": ok2, "indistinguishable": indist, "upper_bound": ok1 and ok2 and indist},
    )
    if not report.checks["upper_bound"]:
        report.notes.append("witness does not certify an upper bound")
    report.elapsed = time.time() - t0
    return report


def enumerate_gng_sets(
    G: LtqGraph,
    g: int,
    max_size: int,
    budget: Optional[int] = None,
) -> Iterator[VertexSet]:
    """Every g-good-neighbor set with at most max_size vertices, by (size, canonical order)."""
    if max_size > G.order:
        raise InvalidBound(f"max_size must be <= 2^n = {G.order}, got {max_size}")
    for level in gng_mask_levels(G, g, max_size, budget):
        for m in level.tolist():
            yield VertexSet.from_mask(G.n, m)


@lru_cache(maxsize=None)
def _pair_tables(n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-mask lookups: union of neighborhoods, members with a neighbor inside,
    vertices with >= 2 neighbors inside."""
    nbr = masks.neighbor_masks(n)
    X = np.arange(1 << len(nbr), dtype=np.uint64)
    nb = masks.expand(X, nbr)
    inner = np.zeros_like(X)
    two = np.zeros_like(X)
    for v in range(len(nbr)):
        bit = masks.ONE << np.uint64(v)
        hits = X & nbr[v]
        inner |= np.where(masks.has_bit(X, v) & (hits != masks.ZERO), bit, masks.ZERO)
        two |= np.where(masks.popcount(hits) >= 2, bit, masks.ZERO)
    for arr in (nb, inner, two):
        arr.setflags(write=False)
    return nb, inner, two


def _inner(R: np.ndarray, nbr: np.ndarray) -> np.ndarray:
    out = np.zeros_like(R)
    for v in range(len(nbr)):
        out |= np.where(masks.has_bit(R, v) & ((R & nbr[v]) != masks.ZERO), masks.ONE << np.uint64(v), masks.ZERO)
    return out


def _two(X: np.ndarray, nbr: np.ndarray) -> np.ndarray:
    out = np.zeros_like(X)
    for v in range(len(nbr)):
        out |= np.where(masks.popcount(X & nbr[v]) >= 2, masks.ONE << np.uint64(v), masks.ZERO)
    return out


def indistinguishable_masks(model: Model, n: int, a: int, B: np.ndarray) -> np.ndarray:
    """For fault set a against every set in B: True where the pair is indistinguishable."""
    nbr = masks.neighbor_masks(n)
    full = masks.full_mask(n)
    a = np.uint64(a)
    D = B ^ a
    R = ~(B | a) & full
    D1 = a & ~B
    D2 = B & ~a
    if len(nbr) <= TABLE_MAX_ORDER:
        nb, inner, two = _pair_tables(n)
        nbD = nb[D.astype(np.intp)]
        if Model(model) is Model.PMC:
            return (nbD & R) == masks.ZERO
        dist = (nbD & inner[R.astype(np.intp)]) != masks.ZERO
        dist |= (two[D1.astype(np.intp)] & R) != masks.ZERO
        dist |= (two[D2.astype(np.intp)] & R) != masks.ZERO
        return ~dist
    nbD = masks.expand(D, nbr)
    if Model(model) is Model.PMC:
        return (nbD & R) == masks.ZERO
    dist = (nbD & _inner(R, nbr)) != masks.ZERO
    dist |= (_two(D1, nbr) & R) != masks.ZERO
    dist |= (_two(D2, nbr) & R) != masks.ZERO
    return ~dist


def _pair_key(a: int, b: int) -> PairKey:
    ka, kb = masks.mask_key(a), masks.mask_key(b)
    small, large = sorted((ka, kb), key=lambda k: (len(k), k))
    return (len(large), len(small), small, large)


@lru_cache(maxsize=8)
def _below(n: int, g: int, bound: int, m: int) -> np.ndarray:
    levels = cached_gng_levels(n, g, bound)
    arr = np.concatenate(levels[:m]) if m else np.zeros(0, dtype=np.uint64)
    arr.setflags(write=False)
    return arr


def _pair_chunk(args: Tuple) -> Tuple[int, Optional[Tuple[PairKey, int, int]]]:
    """Scan level m for rows [start, stop): returns (pairs checked, best hit)."""
    n, g, model, bound, m, start, stop = args
    level = cached_gng_levels(n, g, bound)[m]
    lower = _below(n, g, bound, m)
    checked = 0
    best: Optional[Tuple[PairKey, int, int]] = None
    for i in range(start, stop):
        a = int(level[i])
        partner = None
        if lower.size:
            checked += int(lower.size)
            hit = np.flatnonzero(indistinguishable_masks(model, n, a, lower))
            if hit.size:
                partner = int(lower[hit[0]])
        tail = level[i + 1 :]
        if tail.size:
            checked += int(tail.size)
            if partner is None:
                hit = np.flatnonzero(indistinguishable_masks(model, n, a, tail))
                if hit.size:
                    partner = int(tail[hit[0]])
        if partner is not None:
            key = _pair_key(a, partner)
            if best is None or key < best[0]:
                best = (key, a, partner)
    return checked, best


def _chunks(total: int, workers: int) -> List[Tuple[int, int]]:
    pieces = max(1, min(total, workers * CHUNKS_PER_WORKER))
    step = -(-total // pieces)
    return [(s, min(s + step, total)) for s in range(0, total, step)]


def tg_bruteforce(
    G: LtqGraph,
    g: int,
    model: Model,
    size_bound: int,
    budget: Optional[int] = None,
    workers: int = 1,
    pair_budget: Optional[int] = None,
) -> DiagReport:
    """Exact t_g over g-good-neighbor sets of size <= size_bound.

    Levels run on max(|F1|, |F2|) = 1, 2, ...; the first level with an
    indistinguishable pair is scanned completely and the pair reported is the
    smallest by (max size, min size, canonical keys). With no such pair in
    range the report says t_g >= size_bound (exact=False).
    """
    model = Model(model)
    check_g(G, g, G.n)
    half = G.order // 2
    if not 1 <= size_bound <= half:
        raise InvalidBound(f"size_bound must be in [1, 2^(n-1) = {half}], got {size_bound}")
    masks.check_search_dimension(G)
    pair_budget = resolve_pair_budget(pair_budget)
    t0 = time.time()

    levels = gng_mask_levels(G, g, size_bound, budget)
    sizes = [int(lv.size) for lv in levels]
    spent = 0
    checked = 0
    for m in range(1, size_bound + 1):
        rows = sizes[m]
        if rows == 0:
            continue
        pairs = rows * sum(sizes[:m]) + comb(rows, 2)
        spent = masks.charge(spent, pairs, pair_budget, f"t_{g}(LTQ_{G.n}) {model.value} pairs up to size {size_bound}")
        args = [(G.n, g, model, size_bound, m, s, e) for s, e in _chunks(rows, workers)]
        results = masks.run_blocks(_pair_chunk, args, workers, parallel=pairs >= masks.PARALLEL_MIN_CANDIDATES)
        checked += sum(c for c, _ in results)
        hits = [b for _, b in results if b is not None]
        logger.info("t_%d LTQ_%d %s level=%d sets=%d pairs=%d hits=%d", g, G.n, model.value, m, rows, pairs, len(hits))
        if hits:
            _, a, b = min(hits)
            Fa, Fb = VertexSet.from_mask(G.n, a), VertexSet.from_mask(G.n, b)
            pair = (Fa, Fb) if (len(Fa), Fa.canonical_key()) <= (len(Fb), Fb.canonical_key()) else (Fb, Fa)
            report = DiagReport(
                n=G.n,
                g=g,
                model=model,
                method="brute_force",
                value=m - 1,
                exact=True,
                witness_pair=pair,
                pairs_checked=checked,
            )
            _note_theorem(report)
            report.elapsed = time.time() - t0
            return report

    report = DiagReport(
        n=G.n,
        g=g,
        model=model,
        method="brute_force",
        value=size_bound,
        exact=False,
        pairs_checked=checked,
        notes=[f"no indistinguishable pair up to size {size_bound}; t_{g} >= {size_bound}"],
    )
    _note_theorem(report)
    report.elapsed = time.time() - t0
    return report


def _note_theorem(report: DiagReport) -> None:
    if in_theorem_range(report.n, report.g, report.model):
        expected = tg_formula(report.n, report.g, report.model)
        report.checks["formula"] = expected
        report.checks["matches_formula"] = report.exact and report.value == expected
    else:
        report.notes.append("outside-theorem-range")


def classical_diagnosability(
    G: LtqGraph,
    model: Model,
    size_bound: int,
    budget: Optional[int] = None,
    workers: int = 1,
    pair_budget: Optional[int] = None,
) -> DiagReport:
    """t(G) with no restriction on fault sets, which is t_g at g = 0."""
    report = tg_bruteforce(G, 0, model, size_bound, budget, workers, pair_budget)
    report.notes = [n for n in report.notes if n != "outside-theorem-range"]
    report.notes.append("classical diagnosability (g = 0)")
    return report


def _lower_bound_checks(G: LtqGraph, g: int, budget: Optional[int], workers: int) -> Dict[str, Any]:
    checks: Dict[str, Any] = {}
    if g <= G.n - 2:
        expected = kappa_formula(G.n, g)
        try:
            cut = kappa_g(G, g, expected, budget, workers)
            checks["kappa"] = cut.size if cut.found else None
            checks["kappa_formula"] = expected
            checks["kappa_ok"] = cut.found and cut.size == expected
        except (BudgetExceeded, DimensionOutOfRange) as e:
            checks["kappa"] = f"skipped: {e.code}"
    try:
        checks["min_subgraph_order_ok"] = verify_min_subgraph_order(G, g, 1 << g, budget, workers)
    except (BudgetExceeded, DimensionOutOfRange) as e:
        checks["min_subgraph_order_ok"] = f"skipped: {e.code}"
    return checks


def verify_theorem(
    n: int,
    g: int,
    model: Model,
    budget: Optional[int] = None,
    workers: int = 1,
    pair_budget: Optional[int] = None,
) -> DiagReport:
    """Check the closed form at (n, g, model) as far as desk-scale search allows.

    n = 4: exhaustive brute force up to the formula value + 1.
    n >= 5: witness upper bound, plus kappa^g and the min-degree subgraph order
    when they fit the budget; the report is never exact.
    """
    model = Model(model)
    expected = tg_formula(n, g, model)
    G = LtqGraph(n)
    t0 = time.time()
    if n == 4:
        report = tg_bruteforce(G, g, model, expected + 1, budget, workers, pair_budget)
        report.checks["verified"] = "exact"
        return report

    report = witness_report(G, g, model)
    report.checks["formula"] = expected
    report.checks["matches_formula"] = report.value == expected
    report.checks.update(_lower_bound_checks(G, g, budget, workers))
    report.checks["verified"] = "upper_bound" if report.checks["upper_bound"] else "none"
    report.elapsed = time.time() - t0
    return report


def monotone_in_g(reports: Sequence[DiagReport]) -> bool:
    """Values never decrease as g grows (same n and model)."""
    if not reports:
        return True
    keys = {(r.n, Model(r.model)) for r in reports}
    if len(keys) > 1:
        raise DomainMismatch(f"reports mix graphs or models: {sorted((n, m.value) for n, m in keys)}")
    ordered = sorted(reports, key=lambda r: r.g)
    return all(a.value <= b.value for a, b in zip(ordered, ordered[1:]))
