"""Live progress display during a gradient-flow solve."""

from rich.console import Console, Group
from rich.live import Live
from rich.panel import Panel
from rich.text import Text

from src.fields import Config
from src.functional import FlowOptions, FlowResult, FunctionalParams, flow_minimize
from src.models import IterationRecord

console = Console()


def _build_progress(label: str, row: IterationRecord | None, max_iters: int) -> Group:
    """Build a renderable with the latest trace row."""
    lines: list[Text] = []
    header = Text()
    header.append("  ● ", style="yellow")
    header.append(label, style="bold yellow")
    lines.append(header)
    if row is None:
        lines.append(Text("    starting ...", style="dim"))
        return Group(*lines)
    for name, value in (
        ("iteration", f"{row.iter} / {max_iters}"),
        ("action", f"{row.action:.10g}"),
        ("grad rms", f"{row.grad_norm:.3e}"),
        ("max |psi|", f"{row.psi_sup:.4g}"),
        ("I+ / I-", f"{row.i_plus:.4g} / {row.i_minus:.4g}"),
    ):
        line = Text()
        line.append(f"    {name:<10}", style="dim")
        line.append(value)
        lines.append(line)
    return Group(*lines)


def _panel(body: Group, title: str, color: str) -> Panel:
    return Panel(
        body,
        title=f"[bold {color}]{title}[/bold {color}]",
        border_style=color,
        expand=False,
        padding=(1, 2),
    )


def run_with_progress(
    c0: Config, p: FunctionalParams, opts: FlowOptions, label: str, every: int = 10
) -> FlowResult:
    """Run ``flow_minimize`` while showing live progress.

    The panel refreshes every ``every`` iterations; the caller's own callback,
    if any, still sees every row.
    """
    user_callback = opts.callback

    with Live(console=console, refresh_per_second=8, transient=False) as live:
        live.update(_panel(_build_progress(label, None, opts.max_iters), "Gradient flow", "blue"))

        def on_row(row: IterationRecord) -> None:
            if user_callback:
                user_callback(row)
            if row.iter % every == 0:
                live.update(_panel(_build_progress(label, row, opts.max_iters), "Gradient flow", "blue"))

        opts = FlowOptions(
            tol=opts.tol,
            max_iters=opts.max_iters,
            gauge_fix_period=opts.gauge_fix_period,
            bb_steps=opts.bb_steps,
            callback=on_row,
        )
        result = flow_minimize(c0, p, opts)

        done = "Converged" if result.converged else "Stopped"
        color = "green" if result.converged else "yellow"
        live.update(_panel(_build_progress(label, result.trace[-1], opts.max_iters), done, color))

    return result
