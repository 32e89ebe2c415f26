import csv
import io
import json

import pytest

from fittedcd.cli import main
from fittedcd.postproc import ErrorTable
from fittedcd.runner import (
    ConfigError,
    ExperimentConfig,
    emit,
    emit_table,
    run,
    table_from_json,
    write_atomic,
)


def small(**kw):
    base = dict(problem="example1", variant="lstar", eps_exponents=[0, 8], n_values=[8, 16], bench_n=64)
    base.update(kw)
    return ExperimentConfig.from_dict(base)


def test_one_cell_csv():
    t = ErrorTable("example1", "lstar")
    t[12, 64] = 0.1103
    rows = list(csv.reader(io.StringIO(emit_table(t, "csv"))))
    assert rows == [["problem", "variant", "eps_exp", "n", "value", "kind"], ["example1", "lstar", "12", "64", "0.1103", "error"]]


def test_markdown_layout():
    result = run(small(eps_exponents=[0, 4, 8], n_values=[8, 16, 32]))
    lines = emit(result, "markdown").strip().splitlines()
    header = [c.strip() for c in lines[2].strip("|").split("|")]
    assert header[1:] == ["8", "16", "32"]
    body = lines[4:]
    assert len(body) == 3
    assert all(len(c.strip()) == 6 for line in body for c in line.strip("|").split("|")[1:])


def test_json_round_trip_bitwise():
    table = run(small()).table
    back = table_from_json(emit_table(table, "json"))
    assert back.cells == table.cells and back.kind == table.kind
    assert emit_table(back, "json") == emit_table(table, "json")


def test_orders_table_contents():
    result = run(small(mode="orders", problem="example2", eps_exponents=[0, 12], n_values=[8, 16]))
    t = result.table
    assert t.kind == "diff" and t.n_values == [8, 16, 32]
    assert set(t.orders()) == {(k, n) for k in (0, 12) for n in (8, 16)}
    rows = list(csv.DictReader(io.StringIO(emit(result, "csv"))))
    kinds = {r["kind"] for r in rows}
    assert kinds == {"diff", "order", "uniform"}
    first = next(r for r in rows if r["kind"] == "order" and r["eps_exp"] == "0")
    assert float(first["value"]) == pytest.approx(1.9297, abs=1e-3)
    assert "Uniform" in emit(result, "markdown")


def test_parallel_matches_serial():
    serial = emit(run(small(parallel=1)), "csv")
    parallel = emit(run(small(parallel=2)), "csv")
    assert serial == parallel


def test_verify_mode_default_sweep_passes():
    result = run(
        ExperimentConfig(problem="all", variant="all", mode="verify", eps_exponents=[0, 8, 20], n_values=[8, 32])
    )
    assert not result.failed
    checks = {(r[0], r[1], r[2]) for r in result.checks}
    assert ("m-matrix", "example2", "upwind") in checks
    assert ("exact-corner", "layer-test", "fitted-fd") in checks


@pytest.mark.parametrize(
    "bad",
    [
        {"n_values": []},
        {"n_values": [8, 7]},
        {"n_values": [16, 8]},
        {"mode": "orders", "n_values": [8, 32]},
        {"problem": "example2"},
        {"variant": "central"},
        {"bench_n": 3},
        {"output": "xml"},
        {"solver": {"tol": 2.0}},
        {"solver": {"method": "cg"}},
        {"colour": "red"},
    ],
)
def test_config_validation(bad):
    base = dict(problem="example1", variant="lstar", eps_exponents=[0], n_values=[8])
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({**base, **bad})


def test_config_json_round_trip():
    cfg = small(solver={"tol": 1e-11, "max_sweeps": 10, "method": "line"})
    again = ExperimentConfig.from_json(json.dumps(cfg.to_dict()))
    assert again == cfg


def test_cli_table_to_file(tmp_path):
    out = tmp_path / "t.json"
    code = main(["table", "--eps-exp", "0,12", "--n", "8,16", "--bench-n", "64", "--format", "json", "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert set(data["values"]) == {"0", "12"}
    assert not list(tmp_path.glob(".tmp-*"))


def test_cli_config_file_with_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"problem": "example1", "variant": "upwind", "eps_exponents": [0], "n_values": [8, 16], "bench_n": 64}))
    assert main(["table", "--config", str(cfg), "--n", "8", "--format", "csv"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 1 and rows[0]["variant"] == "upwind"
    assert float(rows[0]["value"]) == pytest.approx(0.1245, abs=1e-3)


def test_cli_solve_dump(capsys):
    assert main(["solve", "--eps-exp", "8", "--n", "8"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert list(rows[0]) == ["i", "j", "x", "y", "u"] and len(rows) == 81


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["orders", "--n", "8,24"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["table", "--config", str(bad)]) == 2
    assert main(["table", "--config", str(tmp_path / "missing.json")]) == 2
    code = main(["table", "--eps-exp", "0", "--n", "16", "--solver", "line", "--max-sweeps", "1"])
    assert code == 1
    assert "eps=2^-0, N=16" in capsys.readouterr().err


def test_cli_verify(capsys):
    assert main(["verify", "--n", "8", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert rows and all(r["passed"] for r in rows)


def test_write_atomic_replaces(tmp_path):
    target = tmp_path / "out.txt"
    target.write_text("old")
    write_atomic(str(target), "new")
    assert target.read_text() == "new"
