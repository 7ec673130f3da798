import pytest

from ltqdiag.errors import FormatError
from ltqdiag.topology.patterns import block_pattern, expand_pattern, repeat_pattern


def test_block_pattern_shapes():
    assert block_pattern(4, 1) == "00X0"
    assert block_pattern(5, 2) == "00XX0"
    assert block_pattern(6, 3) == "00XXX0"


def test_expand_fills_free_positions():
    assert expand_pattern("00X0").labels() == ["0000", "0010"]
    assert len(expand_pattern("XXX")) == 8
    assert expand_pattern("101").labels() == ["101"]
    assert expand_pattern("x1").labels() == ["01", "11"]


def test_repeat_pattern_runs():
    assert repeat_pattern([("1", 1), ("0", 2), ("X", 2), ("0", 0), ("1", 1)]) == "100XX1"


@pytest.mark.parametrize("bad", ["", "0201", "0 1"])
def test_expand_rejects_bad_patterns(bad):
    with pytest.raises(FormatError):
        expand_pattern(bad)


def test_repeat_pattern_rejects_bad_runs():
    with pytest.raises(FormatError):
        repeat_pattern([("Y", 2)])
    with pytest.raises(FormatError):
        repeat_pattern([("0", -1)])
