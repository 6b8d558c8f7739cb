from __future__ import annotations

import csv
import json

import pytest
from pydantic import ValidationError

import src.models
from src.config import Settings
from src.models import IterationRecord, RunConfig
from src.runs import (
    ConfigFileError,
    RunRecorder,
    load_run_config,
    merge_options,
    resolve_run_config,
    write_trace_csv,
)

RUN_FILE = """\
[lattice]
size = 6,6,6,6
spacing = 0.5
flux = 2,0,0,0,0,-2

[solver]
max_iters = 300
tol = 1e-6

[run]
seed = 11
"""


@pytest.fixture
def run_file(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(RUN_FILE)
    return path


def test_defaults():
    cfg = RunConfig()
    assert cfg.lattice.size == [8, 8, 8, 8]
    assert cfg.lattice.spacing == [1.0] * 4
    assert cfg.functional.form == "weitzenbock"
    assert cfg.solver.step == "bb"
    assert cfg.run.starts == 1


def test_solver_defaults_follow_the_environment(monkeypatch):
    monkeypatch.setenv("MONOPOLE_LAB_GRAD_TOL", "1e-6")
    monkeypatch.setenv("MONOPOLE_LAB_MAX_ITERS", "250")
    monkeypatch.setenv("MONOPOLE_LAB_GAUGE_FIX_PERIOD", "7")
    monkeypatch.setattr(src.models, "settings", Settings())
    solver = RunConfig().solver
    assert (solver.tol, solver.max_iters, solver.gauge_fix_period) == (1e-6, 250, 7)
    assert RunConfig.model_validate({"solver": {"tol": "1e-4"}}).solver.tol == 1e-4


def test_single_size_means_a_cubic_four_torus():
    cfg = RunConfig.model_validate({"lattice": {"size": "5"}})
    assert cfg.lattice.size == [5, 5, 5, 5]


def test_flux_matrix_is_antisymmetric():
    cfg = RunConfig.model_validate({"lattice": {"size": "4,4,4", "flux": "2,-4,6"}})
    assert cfg.lattice.flux_matrix == [[0, 2, -4], [-2, 0, 6], [4, -6, 0]]


@pytest.mark.parametrize(
    "lattice",
    [{"size": "4,4"}, {"size": "3"}, {"size": "4,4,4,4", "flux": "2,0"}, {"size": "4,4,4", "spacing": "1,1"}],
)
def test_bad_lattice_sections(lattice):
    with pytest.raises(ValidationError):
        RunConfig.model_validate({"lattice": lattice})


def test_solver_values_are_validated():
    with pytest.raises(ValidationError):
        RunConfig.model_validate({"solver": {"tol": "0"}})
    with pytest.raises(ValidationError):
        RunConfig.model_validate({"solver": {"step": "newton"}})


def test_flags_win_over_the_file(run_file):
    cfg = resolve_run_config(run_file, {"solver": {"max_iters": 50}, "run": {"seed": None}})
    assert cfg.lattice.size == [6, 6, 6, 6]
    assert cfg.lattice.spacing == [0.5] * 4
    assert cfg.lattice.flux == [2, 0, 0, 0, 0, -2]
    assert cfg.solver.max_iters == 50
    assert cfg.solver.tol == 1e-6
    assert cfg.run.seed == 11


def test_merge_options_drops_missing_flags():
    assert merge_options({"a": "1", "b": "2"}, {"b": 3, "c": None}) == {"a": "1", "b": 3}


def test_unknown_sections_and_unreadable_files(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[lattice]\nsize = 4\n[plotting]\ncolor = red\n")
    with pytest.raises(ConfigFileError):
        resolve_run_config(path, {})
    with pytest.raises(ConfigFileError):
        load_run_config(tmp_path / "missing.ini")
    path.write_text("size = 4\n")
    with pytest.raises(ConfigFileError):
        load_run_config(path)


def test_recorder_writes_a_manifest(tmp_path):
    with RunRecorder("solve", {"size": "4", "out": tmp_path}, out=tmp_path / "run") as recorder:
        recorder.set_config(RunConfig())
        recorder.add_seeds([3, 4])
        recorder.path("report.json").write_text("{}")
        recorder.add_checks("solve", {"seed3.converged": True})
    manifest = json.loads((tmp_path / "run" / "manifest.json").read_text())
    assert manifest["command"] == "solve"
    assert manifest["exit_code"] == 0
    assert manifest["seeds"] == [3, 4]
    assert manifest["outputs"] == ["report.json"]
    assert manifest["checks"] == {"solve.seed3.converged": True}
    assert manifest["arguments"]["out"] == str(tmp_path)
    assert manifest["config"]["lattice"]["size"] == [8, 8, 8, 8]
    assert manifest["numpy_version"] and manifest["scipy_version"]


def test_recorder_marks_runtime_failures(tmp_path):
    with pytest.raises(RuntimeError):
        with RunRecorder("verify-gauge", {}, out=tmp_path):
            raise RuntimeError("boom")
    assert json.loads((tmp_path / "manifest.json").read_text())["exit_code"] == 3


def test_explicit_finish_is_kept(tmp_path):
    with RunRecorder("topology", {}, out=tmp_path) as recorder:
        recorder.finish(2)
    assert json.loads((tmp_path / "manifest.json").read_text())["exit_code"] == 2


def test_trace_csv(tmp_path):
    rows = [
        IterationRecord(iter=k, action=1.0 / (k + 1), grad_norm=0.1, psi_sup=0.5, i_plus=0.2, i_minus=0.3)
        for k in range(3)
    ]
    path = write_trace_csv(tmp_path / "trace.csv", rows)
    with path.open() as fh:
        read = list(csv.DictReader(fh))
    assert list(read[0]) == ["iter", "action", "grad_norm", "psi_sup", "i_plus", "i_minus"]
    assert [int(r["iter"]) for r in read] == [0, 1, 2]
