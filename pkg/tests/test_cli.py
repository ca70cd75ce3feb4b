import csv
import io
import json
import re

import pytest

from harnacklab import __version__
from harnacklab.cli import build_parser, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_usage_error_exits_two():
    with pytest.raises(SystemExit) as e:
        build_parser().parse_args(["check", "--format", "yaml"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        build_parser().parse_args([])
    assert e.value.code == 2


def test_list_text_and_json(capsys):
    code, out, _ = run_cli(capsys, "list")
    assert code == 0
    assert "cigar_static" in out and "CHK-H4t" in out
    code, out, _ = run_cli(capsys, "list", "--format", "json")
    doc = json.loads(out)
    assert doc["version"] == __version__
    assert len(doc["checks"]) == 24 and len(doc["solitons"]) == 8
    assert doc["grid_checks"] == ["CHK-L1", "CHK-B2", "CHK-EQ1"]


def test_check_pass_exit_zero(capsys):
    code, out, _ = run_cli(capsys, "check", "CHK-S1", "--soliton",
                           "cigar_static", "--points", "4")
    assert code == 0
    assert "[ok ]" in out and "0 failed" in out


def test_check_unknown_ids_exit_two(capsys):
    code, _, err = run_cli(capsys, "check", "CHK-NOPE")
    assert code == 2 and "CHK-NOPE" in err
    code, _, err = run_cli(capsys, "check", "CHK-S1", "--soliton", "moebius")
    assert code == 2 and "moebius" in err


def test_check_forced_failure_exit_one(capsys):
    code, out, _ = run_cli(capsys, "check", "CHK-S1", "--soliton",
                           "cigar_static", "--points", "4",
                           "--tolerance", "1e-300")
    assert code == 1
    assert "FAIL" in out


def test_check_json_schema(capsys):
    code, out, _ = run_cli(capsys, "check", "CHK-H4", "--soliton",
                           "cigar_static", "--points", "4", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert sorted(doc) == ["config", "reports", "seed", "version"]
    row = doc["reports"][0]
    assert row["check_id"] == "CHK-H4" and row["status"] == "pass"
    assert row["n_points"] == 4 and row["max_rel_residual"] <= row["tolerance"]


def test_check_json_deterministic_mod_millis(capsys):
    argv = ("check", "CHK-H4", "CHK-S1", "--soliton", "cigar_flow",
            "--points", "4", "--format", "json")
    _, out1, _ = run_cli(capsys, *argv)
    _, out2, _ = run_cli(capsys, *argv)
    strip = lambda s: re.sub(r'"millis": [0-9.e+-]+', '"millis": 0', s)
    assert strip(out1) == strip(out2)


def test_check_csv_rows(capsys):
    code, out, _ = run_cli(capsys, "check", "CHK-H4", "CHK-H4s", "--soliton",
                           "cigar_static", "--points", "5", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["check_id", "soliton", "point_index", "residual"]
    # the skipped pair contributes no rows; the ran pair one row per point
    assert len(rows) == 1 + 5
    assert all(r[0] == "CHK-H4" and r[1] == "cigar_static" for r in rows[1:])
    assert [int(r[2]) for r in rows[1:]] == list(range(5))
    assert all(float(r[3]) < 1e-8 for r in rows[1:])


def test_check_output_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, _ = run_cli(capsys, "check", "CHK-S1", "--soliton",
                           "cigar_static", "--points", "4",
                           "--format", "json", "--output", str(target))
    assert code == 0 and out == ""
    doc = json.loads(target.read_text())
    assert doc["reports"][0]["status"] == "pass"


def test_grid_csv_and_exit(capsys):
    code, out, _ = run_cli(capsys, "grid", "CHK-L1", "--sizes", "32", "64",
                           "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["check_id", "n", "residual", "observed_order"]
    assert [r[1] for r in rows[1:]] == ["32", "64"]
    assert float(rows[1][2]) > float(rows[2][2])


def test_grid_bad_sizes_exit_two(capsys):
    code, _, err = run_cli(capsys, "grid", "CHK-L1", "--sizes", "16")
    assert code == 2 and "need n >=" in err


def test_grid_unknown_scenario_exit_two(capsys):
    code, _, err = run_cli(capsys, "grid", "CHK-H4")
    assert code == 2 and "CHK-H4" in err


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as e:
        main(["--version"])
    assert e.value.code == 0
    assert __version__ in capsys.readouterr().out
