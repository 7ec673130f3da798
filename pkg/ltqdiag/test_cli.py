import json

import pytest

from ltqdiag.cli import EXIT_BUDGET, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE, main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def _json(capsys, *argv):
    code, out = _run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def fault_file(tmp_path):
    p = tmp_path / "faults.txt"
    p.write_text("# N(0000, 0010)\n0001\n0011\n0100\n0110\n1000\n1010\n")
    return p


def test_graph_edges(capsys):
    code, out = _run(capsys, "graph", "--n", "2")
    assert code == EXIT_OK
    assert out == "00 01\n00 10\n01 11\n10 11\n"


def test_graph_json(capsys):
    code, data = _json(capsys, "graph", "--n", "4", "--format", "json")
    assert code == EXIT_OK
    assert len(data["edges"]) == 32


def test_check_good_and_bad_sets(capsys, fault_file, tmp_path):
    code, data = _json(capsys, "check", str(fault_file), "--n", "4", "--g", "1")
    assert code == EXIT_OK
    assert data["is_gng"] is True
    assert data["size"] == 6

    bad = tmp_path / "star.txt"
    bad.write_text("0001\n0010\n0100\n1000\n")
    code, data = _json(capsys, "check", str(bad), "--n", "4", "--g", "1")
    assert code == EXIT_NEGATIVE
    assert data["violating_vertex"] == "0000"


def test_check_empty_file_and_bad_width(capsys, tmp_path):
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    code, data = _json(capsys, "check", str(empty), "--n", "4", "--g", "4")
    assert code == EXIT_OK
    assert "component_sizes" not in data
    code, data = _json(capsys, "check", str(empty), "--n", "4", "--g", "4", "--components")
    assert data["component_sizes"] == [16]

    wide = tmp_path / "wide.txt"
    wide.write_text("00001\n")
    assert main(["check", str(wide), "--n", "4"]) == EXIT_USAGE


def test_check_conditional(capsys, fault_file, tmp_path):
    code, data = _json(capsys, "check", str(fault_file), "--n", "4", "--conditional", "--components")
    assert code == EXIT_OK
    assert data["conditional"] is True
    assert data["conditional_violating_vertex"] is None
    assert data["component_sizes"] == [2, 8]

    star = tmp_path / "star.txt"
    star.write_text("0001\n0010\n0100\n1000\n")
    code, data = _json(capsys, "check", str(star), "--n", "4", "--g", "0", "--conditional")
    assert code == EXIT_NEGATIVE
    assert data["is_gng"] is True
    assert data["conditional"] is False
    assert data["conditional_violating_vertex"] == "0000"


def test_check_on_a_large_graph(capsys, tmp_path):
    p = tmp_path / "f.txt"
    p.write_text("\n".join(format(v, "022b") for v in (0, 1, 2)) + "\n")
    code, data = _json(capsys, "check", str(p), "--n", "22", "--g", "21")
    assert code == EXIT_NEGATIVE
    assert data["violating_vertex"] == format(3, "022b")
    assert data["free_neighbor_count"] == 20


def test_kappa(capsys):
    code, data = _json(capsys, "kappa", "--n", "4", "--g", "1", "--workers", "1")
    assert code == EXIT_OK
    assert data["size"] == 6
    assert data["bound"] == 7


def test_kappa_budget_exit(capsys):
    code, out = _run(capsys, "kappa", "--n", "4", "--g", "1", "--budget", "10")
    assert code == EXIT_BUDGET
    assert out == ""


def test_witness(capsys):
    code, data = _json(capsys, "witness", "--n", "5", "--g", "2", "--model", "mm*", "--no-timing")
    assert code == EXIT_OK
    assert data["value"] == 15
    assert data["elapsed_ms"] == 0
    assert data["checks"]["upper_bound"] is True


def test_witness_text_output(capsys):
    code, out = _run(capsys, "witness", "--n", "4", "--output", "text")
    assert code == EXIT_OK
    assert "value: 7" in out.splitlines()


def test_tg_formula_and_range(capsys):
    code, data = _json(capsys, "tg", "--n", "6", "--g", "4")
    assert code == EXIT_OK
    assert (data["method"], data["value"]) == ("formula", 31)

    code, _ = _run(capsys, "tg", "--n", "3", "--g", "1")
    assert code == EXIT_USAGE


def test_tg_brute_force(capsys):
    code, data = _json(capsys, "tg", "--n", "4", "--g", "3", "--method", "brute", "--workers", "1")
    assert code == EXIT_OK
    assert data["exact"] is True
    assert data["value"] == 7


def test_tg_brute_force_below_the_answer(capsys):
    code, data = _json(capsys, "tg", "--n", "4", "--g", "3", "--method", "brute", "--bound", "3", "--workers", "1")
    assert code == EXIT_NEGATIVE
    assert data["exact"] is False


def test_syndrome_then_diagnose(capsys, tmp_path):
    faults = tmp_path / "one.txt"
    faults.write_text("0001\n")
    code, out = _run(capsys, "syndrome", str(faults), "--n", "4", "--policy", "all_zero")
    assert code == EXIT_OK
    syndrome = tmp_path / "s.json"
    syndrome.write_text(out)
    assert json.loads(out)["model"] == "pmc"

    code, data = _json(capsys, "diagnose", str(syndrome), "--g", "1")
    assert code == EXIT_OK
    assert data["outcome"] == "unique"
    assert data["t"] == 7
    assert data["faulty"] == ["0001"]


def test_diagnose_ambiguous(capsys, fault_file, tmp_path):
    code, out = _run(capsys, "syndrome", str(fault_file), "--n", "4", "--seed", "5")
    syndrome = tmp_path / "s.json"
    syndrome.write_text(out)
    code, data = _json(capsys, "diagnose", str(syndrome), "--t", "8")
    assert code == EXIT_NEGATIVE
    assert data["outcome"] == "ambiguous"
    assert data["candidates"][0] == ["0001", "0011", "0100", "0110", "1000", "1010"]


def test_mm_diagnose_needs_t_at_n4(capsys, tmp_path):
    faults = tmp_path / "one.txt"
    faults.write_text("0110\n")
    _, out = _run(capsys, "syndrome", str(faults), "--n", "4", "--model", "mm*")
    syndrome = tmp_path / "s.json"
    syndrome.write_text(out)

    code, _ = _run(capsys, "diagnose", str(syndrome))
    assert code == EXIT_USAGE
    code, data = _json(capsys, "diagnose", str(syndrome), "--t", "1")
    assert code == EXIT_OK
    assert data["model"] == "mm*"
    assert data["faulty"] == ["0110"]


def test_diagnose_rejects_a_conflicting_dimension(capsys, tmp_path):
    faults = tmp_path / "one.txt"
    faults.write_text("0001\n")
    _, out = _run(capsys, "syndrome", str(faults), "--n", "4")
    syndrome = tmp_path / "s.json"
    syndrome.write_text(out)
    assert main(["diagnose", str(syndrome), "--n", "5", "--t", "1"]) == EXIT_USAGE
    assert "domain-mismatch" in capsys.readouterr().err
    code, data = _json(capsys, "diagnose", str(syndrome), "--n", "4", "--t", "1")
    assert code == EXIT_OK
    assert data["faulty"] == ["0001"]


def test_diagnose_bad_file(capsys, tmp_path):
    p = tmp_path / "s.json"
    p.write_text('{"model": "pmc", "n": 4, "tests": []}')
    assert main(["diagnose", str(p), "--t", "1"]) == EXIT_USAGE
    assert "domain-mismatch" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [[], ["graph", "--n", "abc"], ["tg", "--model", "xyz"], ["kappa", "--budget", "0"], ["graph", "--n", "1"]],
)
def test_usage_errors(capsys, argv):
    assert main(argv) == EXIT_USAGE


def test_verify_all_quick(capsys, tmp_path):
    code, data = _json(capsys, "verify-all", "--quick", "--no-timing", "--workers", "1", "--results-dir", str(tmp_path))
    assert code == EXIT_OK
    status = {row["id"]: row["status"] for row in data["rows"]}
    assert sorted(status) == list(range(1, 12))
    assert status[3] == status[7] == "partial"
    assert all(s == "pass" for i, s in status.items() if i not in (3, 7))
    details = {row["id"]: row["detail"] for row in data["rows"]}
    assert "(5,2)=not-run[quick]" in details[3]
    assert "MM* t_1(LTQ_4) = 6" in details[10]
    saved = json.loads((tmp_path / "latest_table.json").read_text())
    assert saved == data
