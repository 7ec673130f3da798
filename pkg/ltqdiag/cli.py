#!/usr/bin/env python3

"""ltqdiag command line.

Subcommands:
- graph       export LTQ_n (edges | dot | json)
- check       is a fault-set file g-good-neighbor?
- kappa       smallest g-good-neighbor cut by bounded search
- witness     indistinguishable pair certifying an upper bound on t_g
- syndrome    simulate a PMC or MM* syndrome from a fault-set file
- tg          t_g by formula, witness, brute force or full verification
- diagnose    decode a syndrome file
- verify-all  acceptance suite, writes results/latest_table.json

Exit codes: 0 success, 1 negative answer (not g-good-neighbor, mismatch,
ambiguous, no candidate), 2 usage or parse error, 3 budget exceeded.

Standard output carries only the result; logs go to standard error
(--verbose for progress).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from ltqdiag.config import (
    DEFAULT_SEED,
    FaultyUnitPolicy,
    Model,
    PolicyKind,
    RunConfig,
    default_workers,
    resolve_budget,
    resolve_pair_budget,
)
from ltqdiag.errors import BudgetExceeded, DomainMismatch, FormatError, LtqDiagError
from ltqdiag.harness import acceptance, formats
from ltqdiag.harness.diagnosability import (
    DiagReport,
    formula_report,
    in_theorem_range,
    kappa_formula,
    tg_bruteforce,
    tg_formula,
    verify_theorem,
    witness_report,
)
from ltqdiag.harness.diagnosis import diagnose, syndrome_for
from ltqdiag.harness.fault_model import components, is_conditional_faulty_set, is_g_good_neighbor_set, kappa_g
from ltqdiag.topology.ltq_graph import LtqGraph, format_label

logger = logging.getLogger("ltqdiag")

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

DEFAULT_N = 4

Result = Tuple[Dict[str, Any], int]


def _model(text: str) -> Model:
    try:
        return Model.parse(text)
    except FormatError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _positive(text: str) -> int:
    try:
        value = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help=f"dimension of LTQ_n (default {DEFAULT_N}; diagnose reads it from the syndrome)")
    common.add_argument("--g", type=int, default=1, help="good-neighbor parameter")
    common.add_argument("--model", type=_model, default=None, help="pmc or mm* (default pmc; diagnose reads it from the syndrome)")
    common.add_argument("--budget", type=_positive, default=None, help="candidate subsets cap (LTQDIAG_BUDGET)")
    common.add_argument("--pair-budget", type=_positive, default=None, help="fault-set pairs cap (LTQDIAG_PAIR_BUDGET)")
    common.add_argument("--workers", type=_positive, default=None, help="worker processes (default: all cores)")
    common.add_argument("--output", choices=("json", "text"), default="json")
    common.add_argument("--no-timing", action="store_true", help="report elapsed_ms as 0")
    common.add_argument("--verbose", "-v", action="store_true", help="progress logs on stderr")

    parser = argparse.ArgumentParser(prog="ltqdiag", description="Fault diagnosis on locally twisted cubes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("graph", parents=[common], help="export the edge set")
    p.add_argument("--format", choices=formats.GRAPH_FORMATS, default="edges")

    p = sub.add_parser("check", parents=[common], help="g-good-neighbor check of a fault-set file")
    p.add_argument("fault_file", type=Path)
    p.add_argument("--conditional", action="store_true", help="also check that F holds no whole neighborhood")
    p.add_argument("--components", action="store_true", help="report component sizes of G - F")

    p = sub.add_parser("kappa", parents=[common], help="smallest g-good-neighbor cut")
    p.add_argument("--bound", type=_positive, default=None, help="largest cut size tried (default 2^g(n-g)+1)")

    sub.add_parser("witness", parents=[common], help="indistinguishable witness pair")

    p = sub.add_parser("syndrome", parents=[common], help="simulate a syndrome")
    p.add_argument("fault_file", type=Path)
    p.add_argument("--policy", choices=[k.value for k in PolicyKind], default=PolicyKind.RANDOM.value)
    p.add_argument("--seed", "--policy-seed", dest="seed", type=int, default=DEFAULT_SEED)

    p = sub.add_parser("tg", parents=[common], help="g-good-neighbor diagnosability")
    p.add_argument("--method", choices=("formula", "witness", "brute", "verify"), default="formula")
    p.add_argument("--bound", type=_positive, default=None, help="brute force size bound (default t_g+1 or 2^(n-1))")

    p = sub.add_parser("diagnose", parents=[common], help="decode a syndrome file")
    p.add_argument("syndrome_file", type=Path)
    p.add_argument("--t", type=int, default=None, help="largest fault set considered (default: formula t_g)")

    p = sub.add_parser("verify-all", parents=[common], help="acceptance suite")
    p.add_argument("--quick", action="store_true", help="small samples, leave out the LTQ_5 kappa^g cases")
    p.add_argument("--results-dir", type=Path, default=Path("results"))

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    seed = getattr(args, "seed", DEFAULT_SEED)
    policy = FaultyUnitPolicy(PolicyKind(getattr(args, "policy", PolicyKind.RANDOM.value)), seed)
    return RunConfig(
        n=DEFAULT_N if args.n is None else args.n,
        g=args.g,
        model=args.model or Model.PMC,
        policy=policy,
        seed=seed,
        bound=getattr(args, "bound", None),
        budget=resolve_budget(args.budget),
        pair_budget=resolve_pair_budget(args.pair_budget),
        workers=args.workers or default_workers(),
        output=args.output,
    )


def cmd_graph(config: RunConfig, args: argparse.Namespace) -> int:
    sys.stdout.write(formats.export_graph(LtqGraph(config.n), args.format))
    return EXIT_OK


def cmd_check(config: RunConfig, args: argparse.Namespace) -> Result:
    G = LtqGraph(config.n)
    F = formats.read_fault_set(args.fault_file, config.n)
    report = is_g_good_neighbor_set(G, F, config.g)
    out = {"n": config.n, "g": config.g, "size": len(F), **report.to_dict(config.n)}
    ok = report.is_gng
    if args.conditional:
        cond = is_conditional_faulty_set(G, F)
        out["conditional"] = cond.is_gng
        out["conditional_violating_vertex"] = None if cond.violating_vertex is None else format_label(cond.violating_vertex, config.n)
        ok = ok and cond.is_gng
    if args.components:
        out["component_sizes"] = [len(c) for c in components(G, F)]
    return out, EXIT_OK if ok else EXIT_NEGATIVE


def cmd_kappa(config: RunConfig, args: argparse.Namespace) -> Result:
    G = LtqGraph(config.n)
    bound = config.bound or kappa_formula(config.n, config.g) + 1
    report = kappa_g(G, config.g, bound, config.budget, config.workers)
    out = {"n": config.n, "g": config.g, "bound": bound, "found": report.found, **report.to_dict()}
    out["candidates_checked"] = report.candidates_checked
    return out, EXIT_OK if report.found else EXIT_NEGATIVE


def cmd_witness(config: RunConfig, args: argparse.Namespace) -> Result:
    report = witness_report(LtqGraph(config.n), config.g, config.model)
    return report.to_dict(timing=not args.no_timing), EXIT_OK if report.checks["upper_bound"] else EXIT_NEGATIVE


def cmd_syndrome(config: RunConfig, args: argparse.Namespace) -> Result:
    G = LtqGraph(config.n)
    F = formats.read_fault_set(args.fault_file, config.n)
    return formats.syndrome_to_dict(syndrome_for(config.model, G, F, config.policy)), EXIT_OK


def _tg_exit(report: DiagReport) -> int:
    if report.method == "formula":
        return EXIT_OK
    if report.method == "witness":
        certified = report.checks.get("upper_bound", False)
        if "formula" in report.checks:
            certified = certified and report.checks.get("matches_formula", False)
        return EXIT_OK if certified else EXIT_NEGATIVE
    if not report.exact:
        return EXIT_NEGATIVE
    if "matches_formula" in report.checks:
        return EXIT_OK if report.checks["matches_formula"] else EXIT_NEGATIVE
    return EXIT_OK


def cmd_tg(config: RunConfig, args: argparse.Namespace) -> Result:
    n, g, model = config.n, config.g, config.model
    if args.method == "formula":
        report = formula_report(n, g, model)
    elif args.method == "witness":
        report = witness_report(LtqGraph(n), g, model)
        if in_theorem_range(n, g, model):
            report.checks["formula"] = tg_formula(n, g, model)
            report.checks["matches_formula"] = report.value == report.checks["formula"]
        else:
            report.notes.append("outside-theorem-range")
    elif args.method == "verify":
        report = verify_theorem(n, g, model, config.budget, config.workers, config.pair_budget)
    else:
        G = LtqGraph(n)
        bound = config.bound
        if bound is None:
            half = G.order // 2
            bound = min(half, tg_formula(n, g, model) + 1) if in_theorem_range(n, g, model) else half
        report = tg_bruteforce(G, g, model, bound, config.budget, config.workers, config.pair_budget)
    return report.to_dict(timing=not args.no_timing), _tg_exit(report)


def cmd_diagnose(config: RunConfig, args: argparse.Namespace) -> Result:
    s = formats.read_syndrome(args.syndrome_file)
    if args.n is not None and args.n != s.n:
        raise DomainMismatch(f"--n {args.n} given but the syndrome is for LTQ_{s.n}")
    model = args.model or s.model
    G = LtqGraph(s.n)
    t = args.t
    if t is None:
        if not in_theorem_range(s.n, config.g, model):
            raise FormatError(f"--t is required outside the closed-form range (n={s.n}, g={config.g}, {model.value})")
        t = tg_formula(s.n, config.g, model)
    result = diagnose(G, s, model, config.g, t, config.budget)
    return result.to_dict(), EXIT_OK if result.outcome == "unique" else EXIT_NEGATIVE


def cmd_verify_all(config: RunConfig, args: argparse.Namespace) -> Result:
    rows = acceptance.run_acceptance(
        quick=args.quick,
        workers=config.workers,
        budget=config.budget,
        pair_budget=config.pair_budget,
        out_dir=args.results_dir,
        timing=not args.no_timing,
        progress=False,
    )
    if config.output == "text":
        print(acceptance.format_table(rows), flush=True)
    failed = any(r.status == "fail" for r in rows)
    return {"rows": [r.to_dict(timing=not args.no_timing) for r in rows]}, EXIT_NEGATIVE if failed else EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig, argparse.Namespace], Any]] = {
    "graph": cmd_graph,
    "check": cmd_check,
    "kappa": cmd_kappa,
    "witness": cmd_witness,
    "syndrome": cmd_syndrome,
    "tg": cmd_tg,
    "diagnose": cmd_diagnose,
    "verify-all": cmd_verify_all,
}


def render_text(payload: Dict[str, Any]) -> str:
    lines = []
    for key, value in payload.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{key}:")
            lines += ["  " + " ".join(f"{k}={v}" for k, v in row.items()) for row in value]
        elif isinstance(value, list):
            lines.append(f"{key}: " + " ".join(str(v) for v in value))
        elif isinstance(value, dict):
            lines.append(f"{key}: " + " ".join(f"{k}={v}" for k, v in value.items()))
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK

    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )

    try:
        config = config_from_args(args)
        logger.debug("%s %s", args.command, config)
        outcome = COMMANDS[args.command](config, args)
    except BudgetExceeded as e:
        print(f"ltqdiag: {e.code}: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except LtqDiagError as e:
        print(f"ltqdiag: {e.code}: {e}", file=sys.stderr)
        return EXIT_USAGE

    if isinstance(outcome, int):
        return outcome
    payload, code = outcome
    if args.command == "verify-all" and config.output == "text":
        return code
    sys.stdout.write(formats.dump_json(payload) if config.output == "json" else render_text(payload))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
