"""Set patterns such as 0^{n-g-1}X^g0.

A pattern is a string over {0, 1, X} written most-significant bit first; it
denotes every label obtained by filling the X positions with 0 or 1.
`repeat_pattern` builds the string from (symbol, count) runs so callers can
write the run-length notation directly.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Tuple

from ltqdiag.errors import FormatError
from ltqdiag.topology.ltq_graph import VertexSet


def repeat_pattern(runs: Iterable[Tuple[str, int]]) -> str:
    parts = []
    for symbol, count in runs:
        if symbol not in ("0", "1", "X"):
            raise FormatError(f"pattern symbol must be 0, 1 or X, got {symbol!r}")
        if count < 0:
            raise FormatError(f"negative run length {count} for {symbol!r}")
        parts.append(symbol * count)
    return "".join(parts)


def expand_pattern(pattern: str) -> VertexSet:
    p = pattern.strip().upper()
    if not p or any(ch not in "01X" for ch in p):
        raise FormatError(f"bad pattern {pattern!r}")
    n = len(p)
    free = [n - 1 - i for i, ch in enumerate(p) if ch == "X"]
    base = int(p.replace("X", "0"), 2)
    out = set()
    for bits in product((0, 1), repeat=len(free)):
        v = base
        for pos, b in zip(free, bits):
            v |= b << pos
        out.add(v)
    return VertexSet(n, frozenset(out))


def block_pattern(n: int, g: int) -> str:
    """0^{n-g-1} X^g 0: the g-cube whose neighborhood is the extremal faulty set."""
    return repeat_pattern([("0", n - g - 1), ("X", g), ("0", 1)])
