"""Terminal UI components for Monopole Lab."""

from src.ui.processing import run_with_progress
from src.ui.results import (
    display_config,
    display_error,
    display_solve,
    display_suite,
    display_topology,
)

__all__ = [
    "run_with_progress",
    "display_config",
    "display_error",
    "display_solve",
    "display_suite",
    "display_topology",
]
