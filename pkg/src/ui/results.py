"""Results display formatting."""

from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from src.models import RunConfig, SolveReport, SuiteReport, TopologyReport

console = Console()

PASS = "[green]✓ PASS[/green]"
FAIL = "[red]✗ FAIL[/red]"


def _table(title: str) -> Table:
    return Table(
        title=title,
        show_lines=True,
        border_style="blue",
        title_style="bold blue",
        expand=True,
    )


def display_error(message: str, title: str = "Error") -> None:
    console.print(
        Panel(message, title=f"[bold red]{title}[/bold red]", border_style="red", expand=False)
    )


def display_config(config: RunConfig, title: str = "Resolved configuration") -> None:
    """Show the merged run configuration (used by --dry-run)."""
    text = Text()
    for section, values in config.model_dump().items():
        text.append(f"[{section}]\n", style="bold cyan")
        for key, value in values.items():
            text.append(f"  {key} = ", style="dim")
            text.append(f"{value}\n")
    console.print(Panel(text, title=f"[bold blue]{title}[/bold blue]", border_style="blue", expand=False))


def display_suite(report: SuiteReport) -> None:
    table = _table(f"Suite: {report.suite}")
    table.add_column("Check", ratio=2)
    table.add_column("Value", justify="right", width=12)
    table.add_column("Threshold", justify="right", width=11)
    table.add_column("Status", justify="center", width=10)
    table.add_column("Detail", ratio=3, style="dim")
    for check in report.checks:
        threshold = "" if check.threshold is None else f"{check.threshold:.1e}"
        table.add_row(
            check.name,
            f"{check.value:.3e}",
            threshold,
            PASS if check.passed else FAIL,
            check.detail,
        )
    console.print(table)

    passed = sum(c.passed for c in report.checks)
    color = "green" if report.passed else "red"
    console.print(
        Panel(
            f"[bold]{passed}/{len(report.checks)}[/bold] checks passed in {report.seconds:.1f} s",
            border_style=color,
            expand=False,
        )
    )


def display_solve(reports: list[SolveReport]) -> None:
    table = _table(f"Gradient flow ({len(reports)} start{'s' if len(reports) != 1 else ''})")
    table.add_column("Seed", justify="center", width=6)
    table.add_column("Status", justify="center", width=12)
    table.add_column("Iters", justify="right", width=7)
    table.add_column("Action", justify="right")
    table.add_column("Grad RMS", justify="right")
    table.add_column("|D+psi|", justify="right")
    table.add_column("|F+ - q|", justify="right")
    table.add_column("max|psi|^2", justify="right")
    table.add_column("I+", justify="right")
    for r in reports:
        status = "[green]converged[/green]" if r.converged else "[yellow]stopped[/yellow]"
        bounds = r.bounds
        table.add_row(
            str(r.seed),
            status,
            str(r.iterations),
            f"{r.action:.8g}",
            f"{r.grad_norm:.2e}",
            f"{r.residual_dirac:.2e}",
            f"{r.residual_curv:.2e}",
            f"{bounds.psi_sup2:.4g}" if bounds else "",
            f"{bounds.i_plus:.4g}" if bounds else "",
        )
    console.print(table)

    violations = [f"seed {r.seed}: {v}" for r in reports if r.bounds for v in r.bounds.violations]
    if violations:
        display_error("\n".join(violations), title="Bound violations")


def display_topology(report: TopologyReport) -> None:
    console.print()
    if report.rows:
        table = _table(f"{report.manifold}: Spin^c classes ({len(report.rows)})")
        table.add_column("c1(L^2)", ratio=2)
        table.add_column("c1(L)^2", justify="right")
        table.add_column("dim", justify="right")
        table.add_column("Dirac index", justify="right")
        table.add_column("(chi+sigma)/2", justify="right")
        table.add_column("Char.", justify="center", width=6)
        table.add_column("Counting", ratio=3)
        for row in report.rows:
            table.add_row(
                str(row.c1),
                row.c1_squared,
                row.dimension,
                row.dirac_index,
                row.asd_index,
                "✔" if row.characteristic else "",
                row.count_rule,
            )
        console.print(table)

    if report.basic_classes:
        text = Text()
        for c1 in report.basic_classes:
            text.append("  • ", style="cyan")
            text.append(f"{c1}\n")
        console.print(
            Panel(
                text,
                title=f"[bold]Basic-class candidates ({len(report.basic_classes)})[/bold]",
                border_style="dim",
                expand=False,
            )
        )

    if report.genus_table:
        table = _table("Minimal genus of degree-d curves in CP^2")
        table.add_column("Degree", justify="center")
        table.add_column("Genus", justify="center")
        for degree, genus in report.genus_table:
            table.add_row(str(degree), str(genus))
        console.print(table)

    if report.curvature_bounds:
        table = _table("Curvature estimate on a circle bundle")
        table.add_column("Genus", justify="center")
        table.add_column("|F| bound", justify="right")
        table.add_column("|psi|^2 bound", justify="right")
        for genus, curv, psi in report.curvature_bounds:
            table.add_row(str(genus), f"{curv:.6g}", f"{psi:.6g}")
        console.print(table)

    if report.connected_sum:
        console.print(
            Panel(
                f"Invariants of the connected sum: [bold]{report.connected_sum}[/bold]",
                border_style="magenta",
                expand=False,
            )
        )
    for note in report.notes:
        console.print(f"[dim]{note}[/dim]")
