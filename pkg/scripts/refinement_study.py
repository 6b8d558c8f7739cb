"""Refinement study of the discrete Weitzenbock defect.

Samples one continuum configuration on a sequence of refined tori, prints
the relative defect per spacing with the fitted order, and writes the
rows to a CSV file.

Usage:
    python scripts/refinement_study.py                  # 4-d, sizes from settings
    python scripts/refinement_study.py --dim 3          # 3-d tori
    python scripts/refinement_study.py --sizes 8,16,32,64 --dim 3
"""

from __future__ import annotations

import sys
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# Add project root so we can import src
PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from rich.console import Console  # noqa: E402
from rich.panel import Panel  # noqa: E402
from rich.table import Table  # noqa: E402

from src.config import settings  # noqa: E402
from src.runs import write_rows_csv  # noqa: E402
from src.suites import convergence_order, weitzenbock_refinement  # noqa: E402

console = Console()


def _option(name: str, default: str) -> str:
    if name in sys.argv:
        return sys.argv[sys.argv.index(name) + 1]
    return default


def main() -> None:
    """Run the refinement sequence and report the observed order."""
    dim = int(_option("--dim", "4"))
    sizes = tuple(int(n) for n in _option("--sizes", ",".join(map(str, settings.WEITZENBOCK_SIZES))).split(","))
    length = float(_option("--length", "8.0"))
    seed = int(_option("--seed", "0"))

    console.print()
    console.print(
        Panel(
            "[bold magenta]Monopole Lab — Weitzenbock Refinement[/bold magenta]\n"
            f"[dim]dim {dim}  |  sizes {', '.join(map(str, sizes))}  |  torus length {length:g}[/dim]",
            border_style="magenta",
            expand=False,
        )
    )

    rows = weitzenbock_refinement(dim, sizes, length, seed)

    table = Table(title="Relative defect", show_lines=True, border_style="blue")
    table.add_column("Size", justify="right")
    table.add_column("h", justify="right")
    table.add_column("Defect", justify="right")
    table.add_column("Ratio", justify="right")
    previous = None
    for n, (h, r) in zip(sizes, rows):
        ratio = f"{previous / r:.2f}" if previous else ""
        table.add_row(str(n), f"{h:.4g}", f"{r:.3e}", ratio)
        previous = r
    console.print()
    console.print(table)

    order = convergence_order(rows)
    color = "green" if order >= 1.9 else "red"
    console.print(f"\n[bold]Fitted order:[/bold] [{color}]{order:.3f}[/{color}]")

    settings.OUTPUT_DIR.mkdir(parents=True, exist_ok=True)
    path = write_rows_csv(
        settings.OUTPUT_DIR / f"weitzenbock_refinement_{dim}d.csv",
        ["size", "h", "relative_defect"],
        [[n, h, r] for n, (h, r) in zip(sizes, rows)],
    )
    console.print(f"[dim]Rows written to {path}[/dim]\n")


if __name__ == "__main__":
    main()
