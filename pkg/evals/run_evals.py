"""Acceptance run for monopole-lab.

Runs every verification suite at its acceptance settings and checks the
topology tables of the bundled manifolds against known answers, then
reports results as Rich tables.

Usage:
    python evals/run_evals.py               # Everything
    python evals/run_evals.py --suites      # Verification suites only
    python evals/run_evals.py --topology    # Manifold tables only
    python evals/run_evals.py --quick       # Smaller lattices, fewer samples
"""

from __future__ import annotations

import json
import sys
import time
from dataclasses import replace
from pathlib import Path

from dotenv import load_dotenv
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

load_dotenv()

# Add project root to path so we can import src modules
PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.config import settings  # noqa: E402
from src.errors import MonopoleLabError  # noqa: E402
from src.models import TopologyQuery  # noqa: E402
from src.suites import SuiteContext, run_suite  # noqa: E402
from src.topology import answer_query  # noqa: E402

console = Console()

# ---------------------------------------------------------------------------
# Acceptance criteria
# ---------------------------------------------------------------------------

CRITERIA_PATH = Path(__file__).parent / "acceptance.json"

QUICK = {
    "size": 4,
    "bases": 1,
    "directions": 5,
    "gauge_maps": 10,
    "kahler_configs": 10,
    "starts": 2,
    "spinors": 200,
}


def _load_criteria() -> dict:
    with open(CRITERIA_PATH) as f:
        return json.load(f)


def _context(entry: dict, quick: bool) -> SuiteContext:
    """Acceptance settings of one suite, or its reduced profile with ``--quick``."""
    values = dict(entry.get("context", {}))
    if quick:
        values.update(QUICK)
        values.update(entry.get("quick", {}))
    if "sizes" in values:
        values["sizes"] = tuple(values["sizes"])
    return replace(SuiteContext(), **values)


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def run_suite_evals(criteria: dict, quick: bool) -> list[dict]:
    """Run each listed suite; a suite passes when every one of its checks does."""
    console.print("\n[bold blue]Running Verification Suites...[/bold blue]\n")
    results = []
    for entry in criteria["suites"]:
        ctx = _context(entry, quick)
        start = time.time()
        try:
            report = run_suite(entry["suite"], ctx)
        except MonopoleLabError as exc:
            results.append(
                {"id": entry["id"], "name": entry["suite"], "passed": False, "detail": f"{type(exc).__name__}: {exc}"}
            )
            continue
        failed = [c.name for c in report.checks if not c.passed]
        results.append(
            {
                "id": entry["id"],
                "name": entry["suite"],
                "passed": not failed,
                "detail": ", ".join(failed) if failed else f"{len(report.checks)} checks",
                "seconds": time.time() - start,
            }
        )
        console.print(f"  {'[green]✓' if not failed else '[red]✗'}[/] {entry['suite']}")
    return results


# ---------------------------------------------------------------------------
# Topology tables
# ---------------------------------------------------------------------------


def _compare(entry: dict, report) -> list[str]:
    problems = []
    if "expected_basic_classes" in entry and report.basic_classes != entry["expected_basic_classes"]:
        problems.append(f"basic classes {report.basic_classes}")
    for key, dimension in entry.get("expected_dimension", {}).items():
        rows = {" ".join(map(str, r.c1)): r for r in report.rows}
        if key not in rows or rows[key].dimension != dimension:
            problems.append(f"dimension of {key}")
    if "expected_connected_sum" in entry and report.connected_sum != entry["expected_connected_sum"]:
        problems.append(f"connected sum {report.connected_sum}")
    return problems


def run_topology_evals(criteria: dict) -> list[dict]:
    """Answer each bundled manifold query and compare with the known answers."""
    console.print("\n[bold cyan]Checking Manifold Tables...[/bold cyan]\n")
    results = []
    for entry in criteria["manifolds"]:
        path = settings.MANIFOLDS_DIR / entry["file"]
        query = TopologyQuery.model_validate(json.loads(path.read_text()))
        start = time.time()
        problems = _compare(entry, answer_query(query, threads=settings.THREADS))
        results.append(
            {
                "id": entry["id"],
                "name": query.manifold.name or path.stem,
                "passed": not problems,
                "detail": "; ".join(problems) or "matches",
                "seconds": time.time() - start,
            }
        )
    return results


# ---------------------------------------------------------------------------
# Display results
# ---------------------------------------------------------------------------


def _display_results(title: str, results: list[dict]) -> None:
    table = Table(title=title, show_lines=True, border_style="cyan", title_style="bold cyan")
    table.add_column("ID", style="dim", width=8)
    table.add_column("Name", style="bold", ratio=1)
    table.add_column("Status", justify="center", width=8)
    table.add_column("Detail", ratio=2)
    table.add_column("Time", justify="right", width=8)

    for r in results:
        color = "green" if r["passed"] else "red"
        status = Text("✓ PASS" if r["passed"] else "✗ FAIL", style=color)
        table.add_row(r["id"], r["name"], status, r["detail"], f"{r.get('seconds', 0.0):.1f}s")

    console.print(table)
    console.print()


# ---------------------------------------------------------------------------
# Main entry point
# ---------------------------------------------------------------------------


def main():
    """Run the acceptance checks and exit non-zero if any fails."""
    run_suites = "--topology" not in sys.argv
    run_topology = "--suites" not in sys.argv
    quick = "--quick" in sys.argv

    console.print()
    console.print(
        Panel(
            "[bold magenta]Monopole Lab — Acceptance Run[/bold magenta]\n"
            f"[dim]{'quick settings' if quick else 'acceptance settings'}  |  threads: {settings.THREADS}[/dim]",
            border_style="magenta",
            expand=False,
        )
    )

    criteria = _load_criteria()
    start_time = time.time()
    all_results = []

    if run_suites:
        results = run_suite_evals(criteria, quick)
        _display_results("Verification Suites", results)
        all_results.extend(results)

    if run_topology:
        results = run_topology_evals(criteria)
        _display_results("Manifold Tables", results)
        all_results.extend(results)

    passing = sum(1 for r in all_results if r["passed"])
    console.print(f"[bold]Overall: {passing}/{len(all_results)} passing[/bold]")
    console.print(f"[dim]Completed in {time.time() - start_time:.1f}s[/dim]\n")
    sys.exit(0 if passing == len(all_results) else 1)


if __name__ == "__main__":
    main()
