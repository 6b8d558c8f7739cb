from __future__ import annotations

import csv
import json

import pytest
from typer.testing import CliRunner

import src.main
from src.config import settings
from src.errors import LatticeError
from src.main import app
from src.models import TopologyQuery
from src.topology import k3_data

runner = CliRunner()


def manifest(out) -> dict:
    return json.loads((out / "manifest.json").read_text())


def test_version():
    result = runner.invoke(app, ["version"])
    assert result.exit_code == 0
    assert "monopole-lab" in result.output


# --- verify ---


def test_verify_clifford_writes_report_and_manifest(tmp_path):
    result = runner.invoke(app, ["verify", "clifford", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["suite"] == "clifford"
    with (tmp_path / "checks.csv").open() as fh:
        assert next(csv.reader(fh)) == ["name", "passed", "value", "threshold", "detail"]
    recorded = manifest(tmp_path)
    assert recorded["command"] == "verify-clifford"
    assert recorded["exit_code"] == 0
    assert recorded["checks"]["clifford.anticommutator_4d"] is True


def test_unknown_suite_is_a_usage_error(tmp_path):
    result = runner.invoke(app, ["verify", "nope", "--out", str(tmp_path)])
    assert result.exit_code == 2
    assert manifest(tmp_path)["exit_code"] == 2


def test_dry_run_only_validates(tmp_path):
    result = runner.invoke(app, ["verify", "clifford", "--dry-run", "--out", str(tmp_path)])
    assert result.exit_code == 0
    assert not (tmp_path / "report.json").exists()
    assert manifest(tmp_path)["config"]["lattice"]["size"] == [8, 8, 8, 8]


@pytest.mark.parametrize(
    "args",
    [
        ["verify", "lattice", "--size", "4,4,4,5"],
        ["verify", "lattice", "--size", "3"],
        ["verify", "weitzenbock", "--sizes", "8", "--dry-run"],
        ["verify", "weitzenbock", "--sizes", "8,x", "--dry-run"],
    ],
)
def test_verify_usage_errors(tmp_path, args):
    result = runner.invoke(app, args + ["--out", str(tmp_path)])
    assert result.exit_code == 2


def test_runtime_failures_exit_with_three(tmp_path, monkeypatch):
    def broken(name, ctx):
        raise LatticeError("shape mismatch")

    monkeypatch.setattr(src.main, "run_suite", broken)
    result = runner.invoke(app, ["verify", "gauge", "--out", str(tmp_path)])
    assert result.exit_code == 3
    assert manifest(tmp_path)["exit_code"] == 3


def test_unexpected_failures_still_leave_a_manifest(tmp_path, monkeypatch):
    def broken(name, ctx):
        raise RuntimeError("numerics blew up")

    monkeypatch.setattr(src.main, "run_suite", broken)
    result = runner.invoke(app, ["verify", "gauge", "--out", str(tmp_path)])
    assert isinstance(result.exception, RuntimeError)
    assert manifest(tmp_path)["exit_code"] == 3


# --- solve ---


def test_solve_from_the_zero_configuration(tmp_path):
    result = runner.invoke(app, ["solve", "--size", "4", "--amplitude", "0", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    for name in ("trace_seed0.csv", "a_seed0.snap", "psi_seed0.snap", "report.json"):
        assert (tmp_path / name).exists()
    reports = json.loads((tmp_path / "report.json").read_text())
    assert reports[0]["converged"] is True
    assert manifest(tmp_path)["checks"] == {"solve.seed0.converged": True, "solve.seed0.bounds": True}


def test_solve_reports_a_failed_check_at_the_iteration_cap(tmp_path):
    result = runner.invoke(app, ["solve", "--size", "4", "--max-iters", "3", "--out", str(tmp_path)])
    assert result.exit_code == 1
    assert manifest(tmp_path)["checks"]["solve.seed0.converged"] is False


@pytest.mark.parametrize(
    "args",
    [
        ["--size", "4,4,4"],
        ["--size", "4", "--flux", "1,2"],
        ["--size", "4", "--flux", "9,0,0,0,0,0"],
        ["--size", "4", "--tol", "-1"],
    ],
)
def test_solve_usage_errors(tmp_path, args):
    result = runner.invoke(app, ["solve", *args, "--out", str(tmp_path)])
    assert result.exit_code == 2
    assert manifest(tmp_path)["exit_code"] == 2


def test_flags_override_the_run_file(tmp_path):
    run_file = tmp_path / "run.ini"
    run_file.write_text("[lattice]\nsize = 6\nflux = 2,0,0,0,0,-2\n[solver]\nmax_iters = 100\n")
    out = tmp_path / "out"
    result = runner.invoke(
        app, ["solve", "--config", str(run_file), "--max-iters", "7", "--dry-run", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    recorded = manifest(out)
    assert recorded["config"]["lattice"]["size"] == [6, 6, 6, 6]
    assert recorded["config"]["lattice"]["flux"] == [2, 0, 0, 0, 0, -2]
    assert recorded["config"]["solver"]["max_iters"] == 7
    assert recorded["config_file"] == str(run_file)


# --- topology ---


def test_topology_tables(tmp_path):
    query = {
        "manifold": k3_data().model_dump(),
        "classes": [[0] * 22],
        "thom_degrees": [1, 2, 3],
    }
    path = tmp_path / "k3.json"
    path.write_text(json.dumps(query))
    out = tmp_path / "out"
    result = runner.invoke(app, ["topology", str(path), "--out", str(out)])
    assert result.exit_code == 0, result.output
    report = json.loads((out / "topology.json").read_text())
    assert report["rows"][0]["dimension"] == "0"
    with (out / "genus.csv").open() as fh:
        rows = list(csv.reader(fh))
    assert rows == [["degree", "genus"], ["1", "0"], ["2", "0"], ["3", "1"]]


@pytest.mark.parametrize("text", ["{not json", json.dumps({"b1": 0, "b2_plus": 1})])
def test_topology_rejects_bad_input(tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    out = tmp_path / "out"
    result = runner.invoke(app, ["topology", str(path), "--out", str(out)])
    assert result.exit_code == 2
    assert manifest(out)["exit_code"] == 2


def test_topology_missing_file(tmp_path):
    result = runner.invoke(app, ["topology", str(tmp_path / "missing.json"), "--out", str(tmp_path)])
    assert result.exit_code == 2


@pytest.mark.parametrize("path", sorted(settings.MANIFOLDS_DIR.glob("*.json")), ids=lambda p: p.stem)
def test_bundled_manifolds_are_valid(path):
    query = TopologyQuery.model_validate(json.loads(path.read_text()))
    assert query.manifold.name
