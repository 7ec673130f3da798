"""Acceptance suite behind `ltqdiag verify-all`.

Runs the numbered checks below and writes:
- results/latest_table.json  ({"rows": [...]})

Every check reports pass / fail / partial / skipped. A check is partial when
nothing it ran failed but a required case did not run (budget, --quick, or an
ingredient check that was not a pass). `quick=True` shrinks the sample counts
and leaves out the LTQ_5 kappa^g cases; the n = 4 brute force runs in both
modes (about 5e8 pairs per (g, model), roughly 10 s on one core).

1  recursive and rule-based edge sets agree, n = 2..10
2  n-regular, 2^n vertices, triangle-free, <= 2 common neighbors, n = 2..10
3  kappa^g = 2^g(n-g) for (4,0) (4,1) (4,2) (5,1) (5,2)
4  no subgraph of order < 2^g has min degree >= g, n = 4, g = 1..3
5  PMC t_g(LTQ_4) = 7 for g = 1..3 by brute force
6  witness pairs for n = 5..8 and every g
7  ingredients 3 4 5 6 10 pass, exact and witness values monotone in g
8  structural and per-test distinguishability agree
9  diagnose recovers injected g-good-neighbor fault sets
10 exact MM* t_1(LTQ_4), reported as data
11 generated syndromes are consistent with their fault sets
"""

from __future__ import annotations

import logging
import random
import time
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from ltqdiag.config import DEFAULT_SEED, FaultyUnitPolicy, Model, PolicyKind, resolve_budget
from ltqdiag.errors import BudgetExceeded
from ltqdiag.harness.diagnosability import (
    DiagReport,
    kappa_formula,
    monotone_in_g,
    tg_bruteforce,
    tg_formula,
    witness_pair,
    witness_report,
)
from ltqdiag.harness.diagnosis import (
    diagnose,
    distinguishable,
    jointly_consistent,
    mm_consistent,
    pmc_consistent,
    syndrome_for,
)
from ltqdiag.harness.fault_model import is_g_good_neighbor_set, kappa_g, verify_min_subgraph_order
from ltqdiag.harness.formats import dump_json, write_text
from ltqdiag.topology.ltq_graph import (
    LtqGraph,
    VertexSet,
    has_triangle,
    neighbor_labels,
    neighbors,
    neighbors_recursive,
)

logger = logging.getLogger(__name__)

Status = str  # pass | fail | partial | skipped
Check = Tuple[bool, str]


@dataclass(frozen=True)
class AcceptanceRow:
    id: int
    name: str
    status: Status
    detail: str
    elapsed_ms: int

    def to_dict(self, timing: bool = True) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "status": self.status,
            "detail": self.detail,
            "elapsed_ms": self.elapsed_ms if timing else 0,
        }


@dataclass
class SuiteOptions:
    quick: bool = False
    workers: int = 1
    budget: Optional[int] = None
    pair_budget: Optional[int] = None
    seed: int = DEFAULT_SEED
    progress: bool = True


class _Partial(Exception):
    pass


def random_gng_set(G: LtqGraph, g: int, max_size: int, rng: random.Random) -> VertexSet:
    """Uniform size in [0, max_size], then uniform subsets until one is g-good-neighbor."""
    while True:
        k = rng.randint(0, max_size)
        F = VertexSet(G.n, frozenset(rng.sample(range(G.order), k)))
        if is_g_good_neighbor_set(G, F, g).is_gng:
            return F


def random_set(G: LtqGraph, rng: random.Random) -> VertexSet:
    return VertexSet(G.n, frozenset(v for v in range(G.order) if rng.random() < 0.5))


def check_definitions(opts: SuiteOptions) -> Check:
    top = 8 if opts.quick else 10
    for n in range(2, top + 1):
        G = LtqGraph(n)
        for v in range(G.order):
            if neighbors(G, v) != neighbors_recursive(G, v):
                return False, f"n={n} vertex {v}: rules and recursion disagree"
    return True, f"n=2..{top}"


def check_structure(opts: SuiteOptions) -> Check:
    top = 8 if opts.quick else 10
    for n in range(2, top + 1):
        G = LtqGraph(n)
        shared: Counter = Counter()
        for w in range(G.order):
            nb = neighbor_labels(G, w)
            if len(set(nb)) != n:
                return False, f"n={n} vertex {w} has degree {len(set(nb))}"
            shared.update(combinations(sorted(nb), 2))
        if has_triangle(G):
            return False, f"n={n} has a triangle"
        worst = max(shared.values(), default=0)
        if worst > 2:
            return False, f"n={n} has a pair with {worst} common neighbors"
    return True, f"n=2..{top}"


KAPPA_CASES = ((4, 0), (4, 1), (4, 2), (5, 1), (5, 2))
# kappa^2(LTQ_5) scans sizes 1..12 of 32 vertices, about 4.6e8 subsets
KAPPA_BUDGET = 5 * 10**8


def check_kappa(opts: SuiteOptions) -> Check:
    budget = resolve_budget(opts.budget, default=KAPPA_BUDGET)
    found, missing = [], []
    for n, g in KAPPA_CASES:
        if opts.quick and n > 4:
            missing.append(f"({n},{g})=not-run[quick]")
            continue
        expected = kappa_formula(n, g)
        try:
            report = kappa_g(LtqGraph(n), g, expected + 1, budget, opts.workers)
        except BudgetExceeded as e:
            missing.append(f"({n},{g})=not-run[{e.needed}>{e.budget}]")
            continue
        found.append(f"({n},{g})={report.size}")
        if not report.found or report.size != expected:
            return False, f"kappa^{g}(LTQ_{n}) = {report.size}, expected {expected}"
    if missing:
        raise _Partial(" ".join(found + missing))
    return True, " ".join(found)


def check_min_subgraph(opts: SuiteOptions) -> Check:
    G = LtqGraph(4)
    for g in (1, 2, 3):
        if not verify_min_subgraph_order(G, g, 1 << g, opts.budget, opts.workers):
            return False, f"g={g}: found a subgraph of order < {1 << g}"
    return True, "n=4, g=1..3"


def check_pmc_exact(opts: SuiteOptions, computed: List[DiagReport]) -> Check:
    G = LtqGraph(4)
    values = []
    for g in (1, 2, 3):
        r = tg_bruteforce(G, g, Model.PMC, 8, opts.budget, opts.workers, opts.pair_budget)
        computed.append(r)
        values.append(r.value)
        if not r.exact or r.value != tg_formula(4, g, Model.PMC):
            return False, f"g={g}: brute force {r.value}, formula {tg_formula(4, g, Model.PMC)}"
    return True, f"values {values}"


def _witness_reports(n: int) -> List[DiagReport]:
    G = LtqGraph(n)
    return [witness_report(G, g, m) for g in range(1, n) for m in (Model.PMC, Model.MM_STAR)]


def check_witnesses(opts: SuiteOptions) -> Check:
    for n in range(5, 9):
        G = LtqGraph(n)
        for g in range(1, n):
            F1, F2 = witness_pair(G, g)
            if g <= n - 3:
                sizes = ((1 << g) * (n - g), (1 << g) * (n - g + 1))
            else:
                sizes = (1 << (n - 1), 1 << (n - 1))
            if (len(F1), len(F2)) != sizes:
                return False, f"n={n} g={g}: sizes {(len(F1), len(F2))}, expected {sizes}"
            for model in (Model.PMC, Model.MM_STAR):
                r = witness_report(G, g, model)
                if not r.checks["upper_bound"]:
                    return False, f"n={n} g={g} {model.value}: {r.checks}"
    return True, "n=5..8, all g, both models"


INGREDIENTS = (3, 4, 5, 6, 10)


def check_monotone(opts: SuiteOptions, earlier: Dict[int, str], computed: List[DiagReport]) -> Check:
    failed = [i for i in INGREDIENTS if earlier.get(i) == "fail"]
    if failed:
        return False, f"ingredient checks failed: {failed}"
    groups: Dict[Tuple[int, Model], List[DiagReport]] = {}
    for r in computed:
        if r.exact:
            groups.setdefault((r.n, Model(r.model)), []).append(r)
    for (n, model), reports in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
        if not monotone_in_g(reports):
            return False, f"n={n} {model.value}: exact values not monotone in g"
    for n in range(5, 9):
        reports = _witness_reports(n)
        for model in (Model.PMC, Model.MM_STAR):
            if not monotone_in_g([r for r in reports if r.model is model]):
                return False, f"n={n} {model.value}: witness values not monotone in g"
    detail = f"{len(computed)} exact reports and witness values for n=5..8 monotone"
    unproven = [f"{i}={earlier.get(i, 'missing')}" for i in INGREDIENTS if earlier.get(i) != "pass"]
    if unproven:
        raise _Partial(f"{detail}; ingredients not passed: {' '.join(unproven)}")
    return True, detail


def check_semantics(opts: SuiteOptions) -> Check:
    total = 0
    for n in (2, 3):
        G = LtqGraph(n)
        sets = [VertexSet.from_mask(n, m) for m in range(1 << G.order)]
        for F1, F2 in combinations(sets, 2):
            for model in (Model.PMC, Model.MM_STAR):
                total += 1
                if distinguishable(model, G, F1, F2) == jointly_consistent(model, G, F1, F2):
                    return False, f"n={n} {model.value}: disagreement on {F1} / {F2}"
    samples = 1000 if opts.quick else 10_000
    rng = random.Random(opts.seed)
    for n in (4, 5):
        G = LtqGraph(n)
        for _ in range(samples):
            F1, F2 = random_set(G, rng), random_set(G, rng)
            if F1 == F2:
                continue
            for model in (Model.PMC, Model.MM_STAR):
                total += 1
                if distinguishable(model, G, F1, F2) == jointly_consistent(model, G, F1, F2):
                    return False, f"n={n} {model.value}: disagreement on {F1} / {F2}"
    return True, f"{total} pair checks"


def check_diagnoser(opts: SuiteOptions, mm_value: Optional[int]) -> Check:
    G = LtqGraph(4)
    trials = 20 if opts.quick else 200
    runs = [(Model.PMC, 7)]
    if mm_value is not None:
        runs.append((Model.MM_STAR, mm_value))
    rng = random.Random(opts.seed)
    done = 0
    for model, t in runs:
        for _ in range(trials):
            F = random_gng_set(G, 1, t, rng)
            for kind in PolicyKind:
                policy = FaultyUnitPolicy(kind, rng.getrandbits(63))
                result = diagnose(G, syndrome_for(model, G, F, policy), model, 1, t, opts.budget)
                done += 1
                if result.faulty != F:
                    return False, f"{model.value} t={t}: injected {F}, got {result.outcome}"
    if mm_value is None:
        raise _Partial(f"{done} PMC diagnoses; MM* not run: no exact t_1")
    return True, f"{done} diagnoses"


def check_mm_exact(opts: SuiteOptions, computed: List[DiagReport]) -> Tuple[Check, Optional[int]]:
    r = tg_bruteforce(LtqGraph(4), 1, Model.MM_STAR, 8, opts.budget, opts.workers, opts.pair_budget)
    computed.append(r)
    if not r.exact:
        return (False, f"no indistinguishable pair up to size 8 (t_1 >= {r.value})"), None
    return (True, f"MM* t_1(LTQ_4) = {r.value} (derived)"), r.value


def check_round_trip(opts: SuiteOptions) -> Check:
    samples = 100 if opts.quick else 1000
    rng = random.Random(opts.seed)
    for n in (4, 5):
        G = LtqGraph(n)
        for _ in range(samples):
            F = random_set(G, rng)
            policy = FaultyUnitPolicy(rng.choice(list(PolicyKind)), rng.getrandbits(63))
            if not pmc_consistent(G, F, syndrome_for(Model.PMC, G, F, policy)):
                return False, f"PMC round trip failed for {F}"
            if not mm_consistent(G, F, syndrome_for(Model.MM_STAR, G, F, policy)):
                return False, f"MM* round trip failed for {F}"
    return True, f"{2 * samples} samples per model"


def _run(rows: List[AcceptanceRow], opts: SuiteOptions, cid: int, name: str, fn: Callable[[], Check]) -> Status:
    t0 = time.time()
    try:
        ok, detail = fn()
        status = "pass" if ok else "fail"
    except _Partial as e:
        status, detail = "partial", str(e)
    except BudgetExceeded as e:
        status, detail = "skipped", f"budget: {e}"
    elapsed = int(round((time.time() - t0) * 1000))
    rows.append(AcceptanceRow(cid, name, status, detail, elapsed))
    logger.info("acceptance %d %s: %s (%s)", cid, name, status, detail)
    if opts.progress:
        print(f"[{status:>7}] {cid:>2} {name}: {detail}", flush=True)
    return status


def run_acceptance(
    quick: bool = False,
    workers: int = 1,
    budget: Optional[int] = None,
    pair_budget: Optional[int] = None,
    out_dir: Optional[Path] = Path("results"),
    timing: bool = True,
    progress: bool = True,
) -> List[AcceptanceRow]:
    opts = SuiteOptions(quick=quick, workers=workers, budget=budget, pair_budget=pair_budget, progress=progress)
    rows: List[AcceptanceRow] = []
    status: Dict[int, str] = {}

    status[1] = _run(rows, opts, 1, "definition equivalence", lambda: check_definitions(opts))
    status[2] = _run(rows, opts, 2, "structural invariants", lambda: check_structure(opts))
    status[3] = _run(rows, opts, 3, "kappa^g formula", lambda: check_kappa(opts))
    status[4] = _run(rows, opts, 4, "min subgraph order", lambda: check_min_subgraph(opts))
    computed: List[DiagReport] = []
    mm_value: List[Optional[int]] = [None]

    def mm_step() -> Check:
        check, mm_value[0] = check_mm_exact(opts, computed)
        return check

    status[5] = _run(rows, opts, 5, "PMC t_g at n=4", lambda: check_pmc_exact(opts, computed))
    status[6] = _run(rows, opts, 6, "witness upper bounds", lambda: check_witnesses(opts))
    # 10 runs before 7 and 9: monotonicity reads its report, the MM* diagnoser trials use its value as t
    status[10] = _run(rows, opts, 10, "MM* t_1 at n=4", mm_step)
    status[7] = _run(rows, opts, 7, "lower bounds and monotonicity", lambda: check_monotone(opts, status, computed))
    status[8] = _run(rows, opts, 8, "model semantics equivalence", lambda: check_semantics(opts))
    status[9] = _run(rows, opts, 9, "diagnoser soundness", lambda: check_diagnoser(opts, mm_value[0]))
    status[11] = _run(rows, opts, 11, "syndrome round trip", lambda: check_round_trip(opts))

    rows.sort(key=lambda r: r.id)
    if out_dir is not None:
        write_text(Path(out_dir) / "latest_table.json", dump_json({"rows": [r.to_dict(timing) for r in rows]}))
    return rows


def format_table(rows: List[AcceptanceRow]) -> str:
    lines = ["acceptance:"]
    for r in rows:
        lines.append(f"{r.id:>2}  {r.status:<7}  {r.name:<32}  {r.detail}")
    counts = Counter(r.status for r in rows)
    lines.append(" ".join(f"{s}={counts[s]}" for s in ("pass", "fail", "partial", "skipped")))
    return "\n".join(lines)
