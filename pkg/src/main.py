"""Monopole Lab - command line entry point.

Exit codes: 0 success, 1 a check failed, 2 usage or configuration error,
3 runtime failure inside the numerical code.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler

from src import __version__
from src.config import settings
from src.errors import MonopoleLabError
from src.fields import random_config
from src.functional import (
    FlowOptions,
    FlowResult,
    FunctionalParams,
    constant_eta,
    flow_minimize,
    solve_report,
)
from src.lattice import FluxBackground, TorusLattice, flux_background
from src.models import RunConfig, SolveReport, TopologyQuery
from src.runs import (
    ConfigFileError,
    RunRecorder,
    resolve_run_config,
    write_json,
    write_rows_csv,
    write_trace_csv,
)
from src.snapshot import save_snapshot
from src.suites import SUITES, SuiteContext, run_suite
from src.topology import answer_query
from src.ui.processing import run_with_progress
from src.ui.results import (
    display_config,
    display_error,
    display_solve,
    display_suite,
    display_topology,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3

app = typer.Typer(
    help="Lattice monopole equations: verification suites, gradient-flow solves and topology tables.",
    add_completion=False,
    no_args_is_help=True,
)
console = Console()
logger = logging.getLogger(__name__)


class UsageError(ValueError):
    """Invalid combination of flags."""


@app.callback()
def main(
    log_level: str = typer.Option(settings.LOG_LEVEL, "--log-level", help="Python logging level"),
) -> None:
    """Configure logging once for every command."""
    logging.basicConfig(
        level=log_level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


@app.command()
def version() -> None:
    """Print the package version."""
    console.print(f"monopole-lab {__version__}")


# ---------------------------------------------------------------------------
# Shared plumbing
# ---------------------------------------------------------------------------


def _section_flags(**sections: dict[str, Any]) -> dict[str, dict[str, Any]]:
    return {name: {k: v for k, v in values.items() if v is not None} for name, values in sections.items()}


def _execute(
    recorder: RunRecorder,
    prepare: Callable[[], Any],
    compute: Callable[[Any], int],
) -> None:
    """Run ``prepare`` (usage errors -> 2) then ``compute`` (runtime errors -> 3).

    The manifest is written whatever happens; an unexpected exception leaves
    exit code 3 in it before propagating.
    """
    with recorder:
        try:
            prepared = prepare()
        except (ValidationError, ValueError, MonopoleLabError) as exc:
            display_error(str(exc), title="Configuration error")
            recorder.finish(EXIT_USAGE)
            raise typer.Exit(EXIT_USAGE) from exc
        try:
            code = compute(prepared)
        except MonopoleLabError as exc:
            logger.error("%s: %s", type(exc).__name__, exc)
            display_error(str(exc), title=type(exc).__name__)
            recorder.finish(EXIT_RUNTIME)
            raise typer.Exit(EXIT_RUNTIME) from exc
        recorder.finish(code)
    raise typer.Exit(code)


def _dry_run(cfg: RunConfig) -> int:
    display_config(cfg, title="Dry run: configuration is valid")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


@app.command()
def verify(
    suite: str = typer.Argument(..., help=f"One of: {', '.join(SUITES)}"),
    size: Optional[str] = typer.Option(None, "--size", help="Sites per direction (cubic lattice)"),
    spacing: Optional[str] = typer.Option(None, "--spacing", help="Lattice spacing"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed"),
    sizes: Optional[str] = typer.Option(None, "--sizes", help="Refinement sizes, e.g. 8,16,32"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Solver tolerance (bounds suite)"),
    max_iters: Optional[int] = typer.Option(None, "--max-iters", help="Solver iteration cap"),
    threads: Optional[int] = typer.Option(None, "--threads", help="Worker threads"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    config: Optional[Path] = typer.Option(None, "--config", help="Run configuration file"),
    dry_run: bool = typer.Option(False, "--dry-run", help="Validate the configuration and stop"),
) -> None:
    """Run one verification suite and write a JSON report."""
    arguments = {"suite": suite, "size": size, "spacing": spacing, "seed": seed, "sizes": sizes}
    recorder = RunRecorder(f"verify-{suite}", arguments, out=out, config_file=config)

    def prepare() -> tuple[RunConfig, SuiteContext]:
        if suite not in SUITES:
            raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
        flags = _section_flags(
            lattice={"size": size, "spacing": spacing},
            solver={"tol": tol, "max_iters": max_iters},
            run={"seed": seed, "threads": threads},
        )
        cfg = resolve_run_config(config, flags)
        recorder.set_config(cfg)
        if out is None:
            recorder.use_out(cfg.run.out)
        if len(set(cfg.lattice.size)) != 1 or len(set(cfg.lattice.spacing)) != 1:
            raise UsageError("verify suites run on cubic lattices: give one size and one spacing")
        ctx = SuiteContext(
            size=cfg.lattice.size[0],
            spacing=cfg.lattice.spacing[0],
            seed=cfg.run.seed,
            threads=cfg.run.threads,
            tol=cfg.solver.tol,
            max_iters=cfg.solver.max_iters,
            gauge_fix_period=cfg.solver.gauge_fix_period,
        )
        if sizes:
            try:
                ctx.sizes = tuple(int(n) for n in sizes.split(",") if n.strip())
            except ValueError as exc:
                raise UsageError(f"--sizes expects comma separated integers, got {sizes!r}") from exc
            if len(ctx.sizes) < 2:
                raise UsageError("--sizes needs at least two sizes to fit an order")
        return cfg, ctx

    def compute(prepared: tuple[RunConfig, SuiteContext]) -> int:
        cfg, ctx = prepared
        if dry_run:
            return _dry_run(cfg)
        recorder.add_seeds([ctx.seed])
        report = run_suite(suite, ctx)
        display_suite(report)
        write_json(recorder.path("report.json"), report)
        write_rows_csv(
            recorder.path("checks.csv"),
            ["name", "passed", "value", "threshold", "detail"],
            [[c.name, c.passed, c.value, c.threshold, c.detail] for c in report.checks],
        )
        recorder.add_checks(suite, {c.name: c.passed for c in report.checks})
        return EXIT_OK if report.passed else EXIT_CHECK_FAILED

    _execute(recorder, prepare, compute)


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def _solve_start(
    cfg: RunConfig, lat: TorusLattice, bg: FluxBackground, p: FunctionalParams, seed: int, live: bool
) -> tuple[FlowResult, SolveReport]:
    amplitude = cfg.run.amplitude
    psi_amplitude = amplitude if bg.spinor_compatible else 0.0
    if amplitude and not bg.spinor_compatible:
        logger.warning("odd flux %s: no spinor bundle, starting from psi = 0", bg.m.tolist())
    c0 = random_config(lat, bg, seed, amplitude=amplitude, psi_amplitude=psi_amplitude)
    opts = FlowOptions(
        tol=cfg.solver.tol,
        max_iters=cfg.solver.max_iters,
        gauge_fix_period=cfg.solver.gauge_fix_period,
        bb_steps=cfg.solver.step == "bb",
    )
    if live:
        result = run_with_progress(c0, p, opts, label=f"seed {seed}")
    else:
        result = flow_minimize(c0, p, opts)
    return result, solve_report(result, p, seed)


@app.command()
def solve(
    size: Optional[str] = typer.Option(None, "--size", help="Sites per direction, e.g. 8 or 8,8,8,8"),
    spacing: Optional[str] = typer.Option(None, "--spacing", help="Spacing, one value or one per direction"),
    flux: Optional[str] = typer.Option(None, "--flux", help="Fluxes m01,m02,m03,m12,m13,m23"),
    kappa: Optional[float] = typer.Option(None, "--kappa", help="Synthetic scalar curvature constant"),
    eta_amplitude: Optional[float] = typer.Option(None, "--eta-amplitude", help="Self-dual perturbation"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of the first start"),
    starts: Optional[int] = typer.Option(None, "--starts", help="Number of random starts"),
    amplitude: Optional[float] = typer.Option(None, "--amplitude", help="Amplitude of the random start"),
    tol: Optional[float] = typer.Option(None, "--tol", help="RMS gradient tolerance"),
    max_iters: Optional[int] = typer.Option(None, "--max-iters", help="Iteration cap"),
    threads: Optional[int] = typer.Option(None, "--threads", help="Worker threads over starts"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    config: Optional[Path] = typer.Option(None, "--config", help="Run configuration file"),
    dry_run: bool = typer.Option(False, "--dry-run", help="Validate the configuration and stop"),
) -> None:
    """Minimize the monopole functional from random starts."""
    flags = _section_flags(
        lattice={"size": size, "spacing": spacing, "flux": flux},
        functional={"kappa": kappa, "eta_amplitude": eta_amplitude},
        solver={"tol": tol, "max_iters": max_iters},
        run={"seed": seed, "starts": starts, "amplitude": amplitude, "threads": threads},
    )
    recorder = RunRecorder("solve", {k: v for s in flags.values() for k, v in s.items()}, out=out, config_file=config)

    def prepare() -> tuple[RunConfig, TorusLattice, FluxBackground, FunctionalParams]:
        cfg = resolve_run_config(config, flags)
        recorder.set_config(cfg)
        if out is None:
            recorder.use_out(cfg.run.out)
        if len(cfg.lattice.size) != 4:
            raise UsageError("the monopole functional lives on a 4-d lattice")
        if cfg.functional.form != "weitzenbock":
            raise UsageError("solve minimizes the weitzenbock form; the raw form has no gradient")
        lat = TorusLattice(sizes=tuple(cfg.lattice.size), spacings=tuple(cfg.lattice.spacing))
        bg = flux_background(lat, cfg.lattice.flux_matrix)
        p = FunctionalParams(
            kappa=cfg.functional.kappa,
            eta=constant_eta(lat, cfg.functional.eta_amplitude),
            form=cfg.functional.form,
        )
        return cfg, lat, bg, p

    def compute(prepared: tuple[RunConfig, TorusLattice, FluxBackground, FunctionalParams]) -> int:
        cfg, lat, bg, p = prepared
        if dry_run:
            return _dry_run(cfg)
        seeds = [cfg.run.seed + k for k in range(cfg.run.starts)]
        recorder.add_seeds(seeds)
        if cfg.run.threads > 1 and len(seeds) > 1:
            with ThreadPoolExecutor(max_workers=cfg.run.threads) as pool:
                runs = list(pool.map(lambda s: _solve_start(cfg, lat, bg, p, s, live=False), seeds))
        else:
            runs = [_solve_start(cfg, lat, bg, p, s, live=True) for s in seeds]

        reports = []
        for s, (result, report) in zip(seeds, runs):
            reports.append(report)
            write_trace_csv(recorder.path(f"trace_seed{s}.csv"), result.trace)
            save_snapshot(recorder.path(f"a_seed{s}.snap"), lat, result.config.a, "a", degree=1, bg=bg, seed=s)
            save_snapshot(recorder.path(f"psi_seed{s}.snap"), lat, result.config.psi, "psi", bg=bg, seed=s)
        write_json(recorder.path("report.json"), reports)
        display_solve(reports)

        checks = {}
        for r in reports:
            checks[f"seed{r.seed}.converged"] = r.converged
            checks[f"seed{r.seed}.bounds"] = not (r.bounds and r.bounds.violations)
        recorder.add_checks("solve", checks)
        return EXIT_OK if all(checks.values()) else EXIT_CHECK_FAILED

    _execute(recorder, prepare, compute)


# ---------------------------------------------------------------------------
# topology
# ---------------------------------------------------------------------------


@app.command()
def topology(
    input_file: Path = typer.Argument(..., help="Manifold JSON (see data/manifolds)"),
    bound: Optional[int] = typer.Option(None, "--bound", help="Override the basic-class search bound"),
    threads: Optional[int] = typer.Option(None, "--threads", help="Worker threads for the search"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    dry_run: bool = typer.Option(False, "--dry-run", help="Validate the input and stop"),
) -> None:
    """Dimension, index, basic-class and genus-bound tables for a 4-manifold."""
    recorder = RunRecorder("topology", {"input": input_file, "bound": bound}, out=out)

    def prepare() -> tuple[TopologyQuery, int]:
        try:
            data = json.loads(Path(input_file).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigFileError(f"cannot read {input_file}: {exc}") from exc
        query = TopologyQuery.model_validate(data)
        if bound is not None:
            query.bound = bound
        workers = threads if threads is not None else settings.THREADS
        recorder.manifest.threads = workers
        recorder.manifest.config = query.model_dump()
        return query, workers

    def compute(prepared: tuple[TopologyQuery, int]) -> int:
        query, workers = prepared
        if dry_run:
            console.print(f"[green]✓[/green] {input_file} is a valid manifold description")
            return EXIT_OK
        report = answer_query(query, threads=workers)
        display_topology(report)
        write_json(recorder.path("topology.json"), report)
        write_rows_csv(
            recorder.path("classes.csv"),
            ["c1", "c1_squared", "dimension", "dirac_index", "asd_index", "characteristic", "count_rule"],
            [
                [" ".join(map(str, r.c1)), r.c1_squared, r.dimension, r.dirac_index, r.asd_index, r.characteristic, r.count_rule]
                for r in report.rows
            ],
        )
        if report.genus_table:
            write_rows_csv(recorder.path("genus.csv"), ["degree", "genus"], [list(r) for r in report.genus_table])
        return EXIT_OK

    _execute(recorder, prepare, compute)


if __name__ == "__main__":
    app()
