"""Run configuration shared by the solvers and the CLI.

Defaults live here as plain constants plus one frozen dataclass, so a run can be
reproduced from its JSON report alone.

Env:
- LTQDIAG_BUDGET: candidate-subset cap for exhaustive searches (default 10**8)
- LTQDIAG_PAIR_BUDGET: cap on fault-set pairs compared by the t_g brute force (default 10**9)
- LTQDIAG_HEAVY: set to 1 to enable the long acceptance tests
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ltqdiag.errors import FormatError


DEFAULT_BUDGET = 10**8
DEFAULT_PAIR_BUDGET = 10**9
DEFAULT_SEED = 20240001

BUDGET_ENV = "LTQDIAG_BUDGET"
PAIR_BUDGET_ENV = "LTQDIAG_PAIR_BUDGET"
HEAVY_ENV = "LTQDIAG_HEAVY"


class Model(str, Enum):
    PMC = "pmc"
    MM_STAR = "mm*"

    @classmethod
    def parse(cls, text: str) -> "Model":
        t = text.strip().lower()
        if t in ("mm", "mmstar", "mm_star", "mm-star"):
            t = "mm*"
        try:
            return cls(t)
        except ValueError:
            raise FormatError(f"unknown model {text!r} (expected pmc or mm*)") from None


class PolicyKind(str, Enum):
    ALL_ZERO = "all_zero"
    ALL_ONE = "all_one"
    RANDOM = "random"


@dataclass(frozen=True)
class FaultyUnitPolicy:
    """Outcome of tests whose tester/comparator is faulty (the "0 or 1" rows)."""

    kind: PolicyKind = PolicyKind.RANDOM
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise FormatError(f"policy seed must be a 64-bit unsigned integer, got {self.seed}")


def default_workers() -> int:
    return os.cpu_count() or 1


def _resolve(explicit: Optional[int], env: str, default: int) -> int:
    if explicit is not None:
        if int(explicit) < 1:
            raise FormatError(f"budget must be positive, got {explicit}")
        return int(explicit)
    raw = os.environ.get(env)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(float(raw))
    except ValueError:
        raise FormatError(f"{env}={raw!r} is not a number") from None
    if value < 1:
        raise FormatError(f"{env} must be positive, got {value}")
    return value


def resolve_budget(budget: Optional[int] = None, default: int = DEFAULT_BUDGET) -> int:
    """Explicit budget wins, then LTQDIAG_BUDGET, then `default`."""
    return _resolve(budget, BUDGET_ENV, default)


def resolve_pair_budget(pair_budget: Optional[int] = None) -> int:
    return _resolve(pair_budget, PAIR_BUDGET_ENV, DEFAULT_PAIR_BUDGET)


def heavy_enabled() -> bool:
    return os.environ.get(HEAVY_ENV, "").strip() not in ("", "0", "false", "no")


@dataclass(frozen=True)
class RunConfig:
    n: int = 4
    g: int = 1
    model: Model = Model.PMC
    policy: FaultyUnitPolicy = field(default_factory=FaultyUnitPolicy)
    seed: int = DEFAULT_SEED
    bound: Optional[int] = None
    budget: int = field(default_factory=resolve_budget)
    pair_budget: int = field(default_factory=resolve_pair_budget)
    workers: int = field(default_factory=default_workers)
    output: str = "json"
