import pytest

from ltqdiag.config import (
    BUDGET_ENV,
    DEFAULT_BUDGET,
    DEFAULT_PAIR_BUDGET,
    HEAVY_ENV,
    PAIR_BUDGET_ENV,
    FaultyUnitPolicy,
    Model,
    RunConfig,
    heavy_enabled,
    resolve_budget,
    resolve_pair_budget,
)
from ltqdiag.errors import FormatError


def test_budget_precedence(monkeypatch):
    monkeypatch.delenv(BUDGET_ENV, raising=False)
    assert resolve_budget() == DEFAULT_BUDGET == 10**8
    monkeypatch.setenv(BUDGET_ENV, "1e6")
    assert resolve_budget() == 10**6
    assert resolve_budget(42) == 42


def test_pair_budget_env(monkeypatch):
    monkeypatch.delenv(PAIR_BUDGET_ENV, raising=False)
    assert resolve_pair_budget() == DEFAULT_PAIR_BUDGET
    monkeypatch.setenv(PAIR_BUDGET_ENV, "5000")
    assert RunConfig().pair_budget == 5000


@pytest.mark.parametrize("raw", ["lots", "0", "-3"])
def test_bad_budget_env(monkeypatch, raw):
    monkeypatch.setenv(BUDGET_ENV, raw)
    with pytest.raises(FormatError):
        resolve_budget()


def test_explicit_budget_must_be_positive():
    with pytest.raises(FormatError):
        resolve_budget(0)


def test_heavy_flag(monkeypatch):
    monkeypatch.delenv(HEAVY_ENV, raising=False)
    assert not heavy_enabled()
    monkeypatch.setenv(HEAVY_ENV, "1")
    assert heavy_enabled()
    monkeypatch.setenv(HEAVY_ENV, "0")
    assert not heavy_enabled()


def test_model_parse():
    assert Model.parse("PMC") is Model.PMC
    for text in ("mm*", "MM", "mm-star", " mmstar "):
        assert Model.parse(text) is Model.MM_STAR
    with pytest.raises(FormatError):
        Model.parse("comparison")


def test_policy_seed_range():
    FaultyUnitPolicy(seed=2**64 - 1)
    with pytest.raises(FormatError):
        FaultyUnitPolicy(seed=-1)
