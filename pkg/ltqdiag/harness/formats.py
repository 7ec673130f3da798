"""File formats: graph exports, fault-set files, syndrome JSON, report JSON.

Labels are always n-bit binary strings, most significant bit first.

Graph exports (all canonically sorted):
- edges: one line per undirected edge, "u v"
- dot:   `graph LTQ_n { "u" -- "v"; ... }`
- json:  {"n": int, "edges": [[u, v], ...]}

Fault-set file: one label per line. Blank lines and `#` comments are skipped.

Syndrome JSON:
- PMC: {"model": "pmc", "n": int, "tests": [{"u", "v", "out"}]}
- MM*: {"model": "mm*", "n": int, "tests": [{"w", "u", "v", "out"}]}
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Union

from ltqdiag.config import Model
from ltqdiag.errors import FormatError, LtqDiagError
from ltqdiag.harness.diagnosis import MmSyndrome, PmcSyndrome, Syndrome
from ltqdiag.topology.ltq_graph import LtqGraph, VertexSet, edges, format_label, parse_label

PathLike = Union[str, Path]

GRAPH_FORMATS = ("edges", "dot", "json")


def _edge_labels(G: LtqGraph) -> List[List[str]]:
    rows = [[format_label(u, G.n), format_label(v, G.n)] for u, v in edges(G)]
    rows.sort()
    return rows


def graph_to_edge_list(G: LtqGraph) -> str:
    return "".join(f"{u} {v}\n" for u, v in _edge_labels(G))


def graph_to_dot(G: LtqGraph) -> str:
    lines = [f"graph LTQ_{G.n} {{"]
    lines += [f'  "{u}" -- "{v}";' for u, v in _edge_labels(G)]
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_dict(G: LtqGraph) -> dict:
    return {"n": G.n, "edges": _edge_labels(G)}


def export_graph(G: LtqGraph, fmt: str) -> str:
    if fmt == "edges":
        return graph_to_edge_list(G)
    if fmt == "dot":
        return graph_to_dot(G)
    if fmt == "json":
        return dump_json(graph_to_dict(G))
    raise FormatError(f"unknown graph format {fmt!r} (expected one of {', '.join(GRAPH_FORMATS)})")


def parse_fault_set(text: str, n: int) -> VertexSet:
    labels = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            labels.append(parse_label(line, n))
        except FormatError as e:
            raise FormatError(f"line {lineno}: {e}") from None
    return VertexSet(n, frozenset(labels))


def read_fault_set(path: PathLike, n: int) -> VertexSet:
    return parse_fault_set(_read_text(path), n)


def fault_set_to_text(F: VertexSet) -> str:
    return "".join(f"{label}\n" for label in F.labels())


def syndrome_to_dict(s: Syndrome) -> dict:
    n = s.n
    if isinstance(s, PmcSyndrome):
        tests = [{"u": format_label(u, n), "v": format_label(v, n), "out": out} for (u, v), out in s.rows()]
    else:
        tests = [
            {"w": format_label(w, n), "u": format_label(u, n), "v": format_label(v, n), "out": out}
            for (w, u, v), out in s.rows()
        ]
    return {"model": s.model.value, "n": n, "tests": tests}


def _field(row: Dict[str, Any], key: str, n: int, i: int) -> int:
    value = row.get(key)
    if not isinstance(value, str):
        raise FormatError(f"tests[{i}].{key} must be a {n}-bit label string")
    return parse_label(value, n)


def _bit(row: Dict[str, Any], i: int) -> int:
    out = row.get("out")
    if isinstance(out, bool) or out not in (0, 1):
        raise FormatError(f"tests[{i}].out must be 0 or 1, got {out!r}")
    return int(out)


def syndrome_from_dict(data: Any) -> Syndrome:
    """Parse a syndrome document. Duplicate tests are rejected; coverage of the
    test domain is checked later against a graph (DomainMismatch)."""
    if not isinstance(data, dict):
        raise FormatError("syndrome document must be a JSON object")
    try:
        model = Model.parse(str(data.get("model", "")))
    except LtqDiagError as e:
        raise FormatError(str(e)) from None
    n = data.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise FormatError(f"syndrome n must be a positive integer, got {n!r}")
    tests = data.get("tests")
    if not isinstance(tests, list):
        raise FormatError("syndrome tests must be a list")

    outcomes: Dict[tuple, int] = {}
    for i, row in enumerate(tests):
        if not isinstance(row, dict):
            raise FormatError(f"tests[{i}] must be an object")
        if model is Model.PMC:
            key: tuple = (_field(row, "u", n, i), _field(row, "v", n, i))
        else:
            u, v = _field(row, "u", n, i), _field(row, "v", n, i)
            key = (_field(row, "w", n, i), min(u, v), max(u, v))
        if key in outcomes:
            raise FormatError(f"tests[{i}] repeats an earlier test")
        outcomes[key] = _bit(row, i)

    if model is Model.PMC:
        return PmcSyndrome(n, outcomes)
    return MmSyndrome(n, outcomes)


def read_syndrome(path: PathLike) -> Syndrome:
    text = _read_text(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: not valid JSON ({e.msg} at line {e.lineno})") from None
    return syndrome_from_dict(data)


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def write_text(path: PathLike, text: str) -> Path:
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)
    return p


def _read_text(path: PathLike) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e.strerror}") from None
