"""Results directory layout and writers.

    <root>/<subcommand>/<name or UTC timestamp>/
        resolved-config
        results.csv
        trajectories/<run>.csv

File contents depend only on the resolved config, never on the directory
name or the wall clock.
"""

from __future__ import annotations

import logging
import re
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import pandas as pd

from .experiments import ExperimentConfig, ExperimentOutput

log = logging.getLogger("output")

FLOAT_FORMAT = "%.6g"

_UNSAFE = re.compile(r"[^A-Za-z0-9._=-]+")


def run_name(name: Optional[str] = None) -> str:
    return name or datetime.now(timezone.utc).strftime("%Y%m%d-%H%M%S")


def write_csv(frame: pd.DataFrame, path: Path) -> None:
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


class RunDirectory:
    """One results directory for one subcommand invocation."""

    def __init__(self, root: str, subcommand: str, name: Optional[str] = None) -> None:
        self.path = Path(root) / subcommand / run_name(name)

    def write(self, cfg: ExperimentConfig, output: ExperimentOutput) -> Path:
        self.path.mkdir(parents=True, exist_ok=True)
        (self.path / "resolved-config").write_text("\n".join(cfg.to_lines()) + "\n")
        write_csv(output.results, self.path / "results.csv")
        if output.trajectories:
            traj_dir = self.path / "trajectories"
            traj_dir.mkdir(exist_ok=True)
            for run, frame in output.trajectories.items():
                write_csv(frame, traj_dir / f"{_UNSAFE.sub('_', run)}.csv")
        log.info("Wrote %s (%d trajectories)", self.path, len(output.trajectories))
        return self.path
