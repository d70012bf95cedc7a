"""Command-line surface: formats, exit codes, determinism, verify suites."""

import csv
import io
import json
import subprocess
import sys

import pytest

from strataq.cli import build_parser, cell_value, main
from strataq.coeffs import CoeffTable
from strataq.rtring import a_symbolic


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_enumerate_graphs_text(capsys):
    code, out, err = run_cli(capsys, ["enumerate-graphs", "-g", "1", "-n", "1"])
    assert code == 0
    lines = out.splitlines()
    assert lines[-1] == "count=2"
    assert len(lines) == 2 + 1
    assert all("|Aut|=" in line for line in lines[:-1])


def test_enumerate_graphs_json(capsys):
    code, out, err = run_cli(
        capsys, ["enumerate-graphs", "-g", "2", "-n", "0", "--format", "json"]
    )
    assert code == 0
    docs = [json.loads(line) for line in out.splitlines()]
    assert docs[-1] == {"count": 7}
    records = docs[:-1]
    assert len(records) == 7
    for doc in records:
        assert set(doc) == {"automorphisms", "graph"}
        assert doc["automorphisms"] >= 1
        assert set(doc["graph"]) == {"edges", "genus_list", "incidence", "legs"}


def test_enumerate_graphs_csv(capsys):
    code, out, err = run_cli(
        capsys, ["enumerate-graphs", "-g", "1", "-n", "2", "--format", "csv"]
    )
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["kind", "automorphisms", "graph"]
    body, trailer = rows[1:-1], rows[-1]
    assert len(body) == 5
    assert trailer[:2] == ["count", "5"]
    for row in body:
        assert row[0] == "class"
        assert int(row[1]) >= 1
        json.loads(row[2])  # graph column holds compact JSON


def test_enumerate_graphs_empty_unstable(capsys):
    code, out, err = run_cli(capsys, ["enumerate-graphs", "-g", "0", "-n", "2"])
    assert code == 2
    assert "error:" in err


def test_enumerate_bicolored_counts(capsys):
    code, out, err = run_cli(
        capsys, ["enumerate-bicolored", "-g", "2", "-Z", "2", "--anchor", "1"]
    )
    assert code == 0
    assert out.splitlines()[-1] == "count=3"
    # an empty profile is a clean empty listing, not an error
    code, out, err = run_cli(
        capsys, ["enumerate-bicolored", "-g", "1", "-Z", "2", "--anchor", "1"]
    )
    assert code == 0
    assert out.splitlines() == ["count=0"]


def test_enumerate_bicolored_json_fields(capsys):
    code, out, err = run_cli(
        capsys,
        ["enumerate-bicolored", "-g", "1", "-Z", "1,1", "--anchor", "1", "--format", "json"],
    )
    assert code == 0
    docs = [json.loads(line) for line in out.splitlines()]
    assert docs[-1] == {"count": 1}
    (record,) = docs[:-1]
    assert set(record) == {"automorphisms", "multiplicity", "graph"}
    assert record["multiplicity"] == 3


def test_enumerate_bicolored_variants(capsys):
    args = ["enumerate-bicolored", "-g", "2", "-Z", "1,1", "--anchor", "1"]
    code, out, _ = run_cli(capsys, args)
    assert code == 0 and out.splitlines()[-1] == "count=4"
    code, out, _ = run_cli(
        capsys, args + ["--variant", "anchored_both", "--co-anchor", "2"]
    )
    assert code == 0 and out.splitlines()[-1] == "count=4"
    code, out, _ = run_cli(
        capsys, args + ["--variant", "anchored_split", "--co-anchor", "2"]
    )
    assert code == 0 and out.splitlines()[-1] == "count=0"


def test_alpha_rt_text_pinned(capsys):
    code, out, err = run_cli(capsys, ["alpha-rt", "-g", "1", "-Z", "1"])
    assert code == 0
    assert out == "xi + psi_1\n"


def test_alpha_rt_csv_pinned(capsys):
    code, out, err = run_cli(capsys, ["alpha-rt", "-g", "1", "-Z", "1", "--format", "csv"])
    assert code == 0
    assert out == "xi,term,coefficient\n1,1,1/1\n0,psi_1,1/1\n"


def test_alpha_rt_json_structure(capsys):
    code, out, err = run_cli(
        capsys, ["alpha-rt", "-g", "2", "-Z", "1,2", "--format", "json"]
    )
    assert code == 0
    docs = [json.loads(line) for line in out.splitlines()]
    powers = [doc["xi"] for doc in docs]
    assert powers == sorted(powers, reverse=True)
    assert powers[0] == 3  # monic in xi at total weight
    top = docs[0]["terms"]
    assert top == [{"coeff": "1/1", "kappa": [], "psi": [], "bubbles": []}]
    for doc in docs:
        for term in doc["terms"]:
            assert set(term) == {"coeff", "kappa", "psi", "bubbles"}
            assert "/" in term["coeff"]


def test_alpha_rt_rejects_negative_twist(capsys):
    code, out, err = run_cli(capsys, ["alpha-rt", "-g", "2", "-Z", "-1"])
    assert code == 2
    assert "error:" in err


def test_coeff_table_text(capsys):
    code, out, err = run_cli(capsys, ["coeff-table", "-G", "3"])
    assert code == 0
    lines = out.splitlines()
    for expected in ("a_1=1", "a_2=4", "a_3=12", "w_{3,2}=28", "u_{3,2}=12", "u_{3,0}=1"):
        assert expected in lines
    assert err == ""


def test_coeff_table_csv(capsys):
    code, out, err = run_cli(capsys, ["coeff-table", "-G", "3", "--format", "csv"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["kind", "g", "n", "value"]
    assert ["a", "3", "2", "12/1"] in rows
    assert ["w", "3", "2", "28/1"] in rows


def test_coeff_table_json(capsys):
    code, out, err = run_cli(capsys, ["coeff-table", "-G", "2", "--format", "json"])
    assert code == 0
    docs = [json.loads(line) for line in out.splitlines()]
    assert {"kind": "a", "g": 2, "n": 1, "value": "4/1"} in docs


def test_coeff_table_cache_roundtrip(capsys, tmp_path):
    cache = str(tmp_path / "cells.csv")
    argv = ["coeff-table", "-G", "8", "--cache", cache, "--stats"]
    code, first_out, first_err = run_cli(capsys, argv)
    assert code == 0
    assert "loaded_cells=0" in first_err
    computed = int(first_err.split("computed_cells=")[1].split()[0])
    assert computed > 0
    code, second_out, second_err = run_cli(capsys, argv)
    assert code == 0
    assert second_out == first_out  # stats never touch stdout
    assert "computed_cells=0" in second_err
    assert "loaded_cells=%d" % computed in second_err


def test_coeff_table_stats_only_on_request(capsys, tmp_path):
    cache = str(tmp_path / "cells.csv")
    code, out, err = run_cli(capsys, ["coeff-table", "-G", "4", "--cache", cache])
    assert code == 0
    assert err == ""


def test_coeff_table_bad_genus(capsys):
    code, out, err = run_cli(capsys, ["coeff-table", "-G", "0"])
    assert code == 2
    assert "error:" in err


def test_coeff_table_unwritable_cache_is_exit_1(capsys):
    code, out, err = run_cli(
        capsys, ["coeff-table", "-G", "2", "--cache", "/nonexistent-dir/cells.csv"]
    )
    assert code == 1
    assert "error:" in err


def test_cell_value_fallback():
    table = CoeffTable()
    with pytest.raises(ValueError, match="not reachable"):
        cell_value(table, 2, 1, 2)
    assert cell_value(table, 2, 1, 2, fallback="symbolic") == a_symbolic(2, 1, 2) == -8
    # reachable cells never consult the fallback route
    assert cell_value(table, 2, 1, 1, fallback="none") == 4


def test_usage_errors_exit_2(capsys):
    for argv in [
        [],
        ["enumerate-graphs", "-g", "1"],  # missing -n
        ["alpha-rt", "-g", "2", "-Z", "a,b"],  # malformed profile
        ["verify", "nonsense"],
        ["coeff-table", "-G", "2", "--format", "xml"],
    ]:
        with pytest.raises(SystemExit) as excinfo:
            main(argv)
        assert excinfo.value.code == 2
        capsys.readouterr()


def test_byte_determinism(capsys):
    argv = ["enumerate-bicolored", "-g", "2", "-Z", "2,2", "--anchor", "1", "--format", "json"]
    _, first, _ = run_cli(capsys, argv)
    _, second, _ = run_cli(capsys, argv)
    assert first == second


def test_verify_coeffs(capsys):
    code, out, err = run_cli(capsys, ["verify", "coeffs", "-G", "6"])
    assert code == 0
    lines = out.splitlines()
    assert lines[-1] == "pass: 4/4 checks passed"
    assert all(line.startswith("ok   coeffs:") for line in lines[:-1])


def test_verify_coeffs_corrupt_cache_fails(capsys, tmp_path):
    cache = tmp_path / "bad.csv"
    cache.write_text("2,1,1,5/1,identity2\n", "ascii")
    code, out, err = run_cli(capsys, ["verify", "coeffs", "-G", "3", "--cache", str(cache)])
    assert code == 1
    lines = out.splitlines()
    assert lines[-1] == "FAIL: 2/4 checks passed"
    assert any(line.startswith("FAIL coeffs: headline") for line in lines)
    assert any("missing dependency" in line for line in lines)


def test_verify_graphs_small(capsys):
    code, out, err = run_cli(capsys, ["verify", "graphs", "--dim", "1"])
    assert code == 0
    lines = out.splitlines()
    assert lines[-1] == "pass: 5/5 checks passed"


def test_verify_twists_small(capsys):
    code, out, err = run_cli(capsys, ["verify", "twists", "--max-size", "1"])
    assert code == 0
    assert out.splitlines()[-1].startswith("pass: ")


def test_verify_rt_serial_and_parallel_agree(capsys):
    argv = ["verify", "rt", "--max-size", "2"]
    code, serial, _ = run_cli(capsys, argv + ["--jobs", "1"])
    assert code == 0
    assert serial.splitlines()[-1] == "pass: 4/4 checks passed"
    code, parallel, _ = run_cli(capsys, argv + ["--jobs", "2"])
    assert code == 0
    assert parallel == serial


def test_verify_json_format(capsys):
    code, out, err = run_cli(capsys, ["verify", "coeffs", "-G", "4", "--format", "json"])
    assert code == 0
    docs = [json.loads(line) for line in out.splitlines()]
    assert docs[-1] == {"failed": 0, "passed": 4}
    assert all(doc["status"] == "ok" for doc in docs[:-1])


def test_verify_stats_go_to_stderr(capsys):
    code, out, err = run_cli(capsys, ["verify", "coeffs", "-G", "3", "--stats"])
    assert code == 0
    assert "stats: checks=4 failures=0" in err
    assert "stats:" not in out


def test_parser_defaults():
    args = build_parser().parse_args(["verify", "all"])
    assert args.dim == 3
    assert args.max_size is None
    assert args.G is None
    assert args.format == "text"
    assert args.jobs >= 1


def test_console_script_installed():
    proc = subprocess.run(
        ["strataq", "coeff-table", "-G", "2"],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 0
    assert "a_2=4" in proc.stdout.splitlines()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "strataq.cli", "alpha-rt", "-g", "1", "-Z", "1"],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 0
    assert proc.stdout == "xi + psi_1\n"
