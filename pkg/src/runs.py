"""Run configuration files, output directories and the run manifest."""

from __future__ import annotations

import configparser
import csv
import logging
import platform
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np
import scipy
from pydantic import BaseModel

from src import __version__
from src.config import settings
from src.models import IterationRecord, RunConfig, RunManifest

logger = logging.getLogger(__name__)


class ConfigFileError(ValueError):
    """Malformed run configuration file or flag value (usage error)."""


def load_run_config(path: Path) -> dict[str, dict[str, str]]:
    """Read an ini-like ``key = value`` file with sections."""
    parser = configparser.ConfigParser()
    try:
        with Path(path).open() as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigFileError(f"cannot read run config {path}: {exc}") from exc
    return {section: dict(parser[section]) for section in parser.sections()}


def merge_options(file_values: dict[str, str], flags: dict[str, Any]) -> dict[str, Any]:
    """Flag values win over file values; ``None`` flags fall through."""
    merged: dict[str, Any] = dict(file_values)
    merged.update({k: v for k, v in flags.items() if v is not None})
    return merged


def resolve_run_config(
    config_file: Path | None, flags: dict[str, dict[str, Any]]
) -> RunConfig:
    """Run file sections merged with per-section flags, validated as a ``RunConfig``.

    Raises ``ConfigFileError`` for unreadable files or unknown sections and
    pydantic ``ValidationError`` for bad values.
    """
    file_sections = load_run_config(config_file) if config_file else {}
    unknown = set(file_sections) - set(RunConfig.model_fields)
    if unknown:
        raise ConfigFileError(f"unknown run config section(s): {', '.join(sorted(unknown))}")
    merged = {
        section: merge_options(file_sections.get(section, {}), flags.get(section, {}))
        for section in RunConfig.model_fields
    }
    return RunConfig.model_validate(merged)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class RunRecorder:
    """Collects outputs of one command and writes ``manifest.json`` when it ends."""

    def __init__(
        self,
        command: str,
        arguments: dict[str, Any],
        out: Path | None = None,
        config_file: Path | None = None,
    ) -> None:
        stamp = datetime.now(timezone.utc).strftime("%Y%m%d-%H%M%S")
        self.out = Path(out) if out else settings.OUTPUT_DIR / f"{command}-{stamp}"
        self.manifest = RunManifest(
            command=command,
            arguments={k: _jsonable(v) for k, v in arguments.items()},
            config_file=str(config_file) if config_file else None,
            code_version=__version__,
            numpy_version=np.__version__,
            scipy_version=scipy.__version__,
            python_version=platform.python_version(),
            started_at=_now(),
        )
        self._start = time.perf_counter()

    def __enter__(self) -> RunRecorder:
        return self

    def use_out(self, out: str | Path | None) -> None:
        """Redirect outputs (e.g. to the directory named in a run file)."""
        if out:
            self.out = Path(out)

    def path(self, name: str) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        self.manifest.outputs.append(name)
        return path

    def add_seeds(self, seeds: list[int]) -> None:
        self.manifest.seeds.extend(seeds)

    def set_config(self, config: RunConfig) -> None:
        self.manifest.config = config.model_dump()
        self.manifest.threads = config.run.threads

    def add_checks(self, prefix: str, checks: dict[str, bool]) -> None:
        self.manifest.checks.update({f"{prefix}.{name}": ok for name, ok in checks.items()})

    def finish(self, exit_code: int) -> Path:
        self.manifest.finished_at = _now()
        self.manifest.wall_seconds = round(time.perf_counter() - self._start, 3)
        self.manifest.exit_code = exit_code
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / "manifest.json"
        path.write_text(self.manifest.model_dump_json(indent=2))
        logger.info("manifest written to %s", path)
        return path

    def __exit__(self, exc_type, exc, tb) -> None:
        if self.manifest.exit_code is None:
            self.finish(0 if exc_type is None else 3)


def _jsonable(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_trace_csv(path: Path, records: list[IterationRecord]) -> Path:
    fields = list(IterationRecord.model_fields)
    with Path(path).open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for record in records:
            writer.writerow(record.model_dump())
    return Path(path)


def write_rows_csv(path: Path, header: list[str], rows: list[list[Any]]) -> Path:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return Path(path)


def write_json(path: Path, payload: BaseModel | list[BaseModel]) -> Path:
    if isinstance(payload, list):
        text = "[\n" + ",\n".join(p.model_dump_json(indent=2) for p in payload) + "\n]\n"
    else:
        text = payload.model_dump_json(indent=2)
    Path(path).write_text(text)
    return Path(path)
