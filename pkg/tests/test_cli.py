"""Exit codes, determinism, and output formats of the command line."""

import json
import subprocess
import sys

import numpy as np

from eigenfilter.chebpoly import FilterSpec
from eigenfilter.cli import main
from eigenfilter.storage import load_experiment, load_instance, load_report


def run(*argv) -> int:
    # argparse raises SystemExit on usage errors; the process exit code is
    # what the contract pins down, so collapse both paths to one integer
    try:
        return main(list(argv))
    except SystemExit as e:
        return int(e.code)


def test_gen_writes_loadable_instance(tmp_path, capsys):
    path = tmp_path / "inst.qlsp"
    assert run("gen", "--n", "3", "--kappa", "6", "--seed", "1",
               "--out", str(path)) == 0
    out = capsys.readouterr().out
    assert out.startswith("instance n=3 N=8 kappa=6.0 d=3")
    assert "np.float64" not in out
    inst = load_instance(path)
    assert inst.kappa == 6.0 and inst.seed == 1


def test_gen_planted_form_pins_kappa(capsys):
    assert run("gen", "--n", "3", "--kappa", "8", "--form", "planted") == 0
    out = capsys.readouterr().out
    measured = float(out.rsplit("measured_kappa=", 1)[1])
    assert abs(measured - 8.0) <= 1e-6


def test_sparsity_override_is_one_sided(tmp_path, capsys):
    path = tmp_path / "inst.qlsp"
    assert run("gen", "--n", "3", "--kappa", "6", "--d", "5",
               "--out", str(path)) == 0
    capsys.readouterr()
    assert load_instance(path).d == 5
    assert run("gen", "--n", "3", "--kappa", "6", "--d", "2") == 2


def test_poly_is_deterministic_and_within_bound(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ("poly", "--ell", "8", "--gap", "0.2", "--points", "401")
    assert run(*args, "--out", str(a)) == 0
    assert run(*args, "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()
    out = capsys.readouterr().out
    assert out.count("poly kind=filter ell=8") == 2

    lines = a.read_text().splitlines()
    assert lines[0] == "x,value"
    assert len(lines) == 402
    bound = FilterSpec(8, 0.2).error_bound
    for line in lines[1:]:
        x, value = map(float, line.split(","))
        if abs(x) >= 0.2:
            assert abs(value) <= bound
        assert abs(value) <= 1.0 + 1e-12


def test_poly_requires_degree():
    assert run("poly", "--gap", "0.2") == 2


def test_filter_at_exact_eigenvalue(tmp_path, capsys):
    inst_path = tmp_path / "inst.qlsp"
    assert run("gen", "--n", "3", "--kappa", "4", "--form", "planted",
               "--out", str(inst_path)) == 0
    record_path = tmp_path / "outcome.json"
    assert run("filter", "--in", str(inst_path), "--lam", "1.0",
               "--eps", "1e-3", "--out", str(record_path)) == 0
    out = capsys.readouterr().out
    assert "filter lam=" in out
    record = json.loads(record_path.read_text())
    assert record["kind"] == "filter-outcome"
    assert record["fidelity_vs_oracle"] >= 1.0 - 1e-3
    assert 0.0 < record["success_probability"] <= 1.0

    # a point off the spectrum is refused, not silently snapped
    assert run("filter", "--in", str(inst_path), "--lam", "0.123456") == 2


def test_solve_writes_report_and_trace(tmp_path, capsys):
    inst_path = tmp_path / "inst.qlsp"
    assert run("gen", "--n", "3", "--kappa", "6", "--seed", "2",
               "--out", str(inst_path)) == 0

    report_path = tmp_path / "aqc.json"
    trace_path = tmp_path / "aqc_trace.csv"
    assert run("solve", "--in", str(inst_path), "--method", "aqc",
               "--eps", "1e-4", "--out", str(report_path),
               "--trace-out", str(trace_path)) == 0
    report = load_report(report_path)
    assert report.method == "aqc"
    assert report.final_fidelity >= 1.0 - 1e-4
    trace = trace_path.read_text().splitlines()
    assert trace[0] == "s,overlap"
    assert float(trace[1].split(",")[0]) == 0.0

    zeno_trace = tmp_path / "zeno_trace.csv"
    assert run("solve", "--in", str(inst_path), "--method", "zeno",
               "--eps", "1e-3", "--trace-out", str(zeno_trace)) == 0
    lines = zeno_trace.read_text().splitlines()
    assert lines[0] == "j,f,per_step_success,per_step_overlap"
    last = lines[-1].split(",")
    assert float(last[1]) == 1.0

    assert run("solve", "--in", str(inst_path), "--method", "qsp-direct",
               "--eps", "1e-3") == 0
    out = capsys.readouterr().out
    assert out.count("solve method=") == 3
    assert "np.float64" not in out


def test_exit_codes(tmp_path):
    assert run("no-such-command") == 1
    assert run("solve", "--method", "aqc") == 2
    assert run("validate", "--suite", "bogus") == 1
    csv_path = tmp_path / "table.csv"
    csv_path.write_text("kappa,ell,seed,eta\n")
    assert run("solve", "--in", str(csv_path), "--method", "aqc") == 2


def test_validate_minimax_suite(capsys):
    assert run("validate", "--suite", "minimax") == 0
    out = capsys.readouterr().out
    assert out.count("ok minimax") == 9
    assert "validate suite=minimax all checks passed" in out


def test_validate_blockenc_suite(capsys):
    assert run("validate", "--suite", "blockenc") == 0
    out = capsys.readouterr().out
    assert "all checks passed" in out


def test_experiment_writes_table_and_sidecar(tmp_path, capsys):
    path = tmp_path / "sweep.csv"
    assert run("experiment", "fig-a2-right", "--trials", "1",
               "--out", str(path)) == 0
    out = capsys.readouterr().out
    assert "experiment ell-vs-kappa rows=" in out
    result = load_experiment(path)
    assert result.columns == ["kappa", "eta_target", "ell_star"]
    assert result.diagnostics["per_target"]


def test_module_entry_point_is_reproducible(tmp_path):
    cmd = [sys.executable, "-m", "eigenfilter", "gen", "--n", "2",
           "--kappa", "4", "--seed", "9"]
    first = subprocess.run(cmd, capture_output=True, text=True)
    second = subprocess.run(cmd, capture_output=True, text=True)
    assert first.returncode == 0
    assert first.stdout == second.stdout
    assert first.stdout.startswith("instance ")
