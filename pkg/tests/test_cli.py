from click.testing import CliRunner

import recovsys as rs
from recovsys import serialization as ser
from recovsys.cli import main


def run(*args):
    return CliRunner().invoke(main, list(args))


def test_construct_truncated_prints_capacity():
    res = run("construct", "truncated", "--q", "8")
    assert res.exit_code == 0
    assert "capacity 0.48332810449216423 (log base 8)" in res.output


def test_construct_rejects_degenerate_alphabet():
    assert run("construct", "truncated", "--q", "1").exit_code == 2
    assert run("construct", "truncated", "--q", "11").exit_code == 2


def test_construct_edgecover_square():
    res = run("construct", "edgecover", "--t", "2", "--mode", "square")
    assert res.exit_code == 0
    assert "capacity 0.5 (log base 4)" in res.output


def test_construct_marker_and_recursive():
    res = run("construct", "marker", "--q", "3", "--k", "1")
    assert res.exit_code == 0
    res = run("construct", "recursive", "--q", "6")
    assert res.exit_code == 0
    assert "(log base 6)" in res.output


def test_verify_system_exit_codes(tmp_path, trunc8_system):
    gpath = tmp_path / "g.json"
    ser.save_graph(trunc8_system.presentation, gpath)
    res = run("verify", "system", "--graph", str(gpath), "--k", "1", "--l", "1")
    assert res.exit_code == 0
    assert res.output.startswith("PASS")

    full = tmp_path / "full.json"
    ser.save_graph(rs.de_bruijn(2, 2), full)
    res = run("verify", "system", "--graph", str(full), "--k", "1", "--l", "1")
    assert res.exit_code == 1
    assert res.output.startswith("FAIL")

    bad = tmp_path / "bad.json"
    bad.write_text("not json")
    res = run("verify", "system", "--graph", str(bad), "--k", "1", "--l", "1")
    assert res.exit_code == 2


def test_verify_storage_roundtrip(tmp_path, binary_system):
    code = rs.storage_code_for_cycle(binary_system, 5)
    cpath = tmp_path / "code.txt"
    tpath = tmp_path / "table.txt"
    cpath.write_text(ser.codewords_to_text(code.codewords) + "\n")
    tpath.write_text(ser.recovery_table_to_text(code.recovery_table) + "\n")
    res = run(
        "verify", "storage", "--code", str(cpath), "--table", str(tpath),
        "--q", "2", "--n", "5",
    )
    assert res.exit_code == 0 and res.output.startswith("PASS")

    tpath.write_text("0 0 -> 1\n")
    res = run(
        "verify", "storage", "--code", str(cpath), "--table", str(tpath),
        "--q", "2", "--n", "5",
    )
    assert res.exit_code == 1 and res.output.startswith("FAIL")


def test_measure_epsilon_reports_delta_and_gain():
    res = run(
        "measure", "epsilon", "--q", "2", "--k", "1", "--l", "1", "--eps", "0.286"
    )
    assert res.exit_code == 0
    lines = dict(
        line.split(" ", 1) for line in res.output.strip().splitlines()
    )
    assert abs(float(lines["delta"]) - 0.05) < 5e-4
    assert abs(float(lines["gain"].split()[0]) - 0.286 / 3) < 1e-9
    assert lines["epsilon_recoverable"] == "True"


def test_measure_epsilon_zero_budget_has_zero_gain():
    res = run("measure", "epsilon", "--q", "2", "--eps", "0")
    assert res.exit_code == 0
    gain = [l for l in res.output.splitlines() if l.startswith("gain")][0]
    assert abs(float(gain.split()[1])) < 1e-12


def test_measure_maxent_on_edge_cover(tmp_path, edge4_system):
    gpath = tmp_path / "g.json"
    ser.save_graph(edge4_system.presentation, gpath)
    res = run("measure", "maxent", "--graph", str(gpath))
    assert res.exit_code == 0
    h = float(res.output.split()[1])
    assert abs(h - 0.5) < 1e-9


def test_report_bounds_csv_and_determinism():
    first = run("report", "bounds", "--q", "9..16")
    second = run("report", "bounds", "--q", "9..16", "--seed-table")
    assert first.exit_code == 0 and second.exit_code == 0
    assert first.output == second.output
    lines = first.output.strip().splitlines()
    assert lines[0] == "q,eq11_bound,recursive_bound,upper_bound"
    assert len(lines) == 9
    row9 = lines[1].split(",")
    assert row9[0] == "9" and float(row9[2]) == 0.5


def test_report_bounds_rejects_bad_range():
    assert run("report", "bounds", "--q", "16..9").exit_code == 2
