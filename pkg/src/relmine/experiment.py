"""Batch trial runner with a reproducible manifest.

Each (scenario, config, approach) cell derives per-trial seeds from the
master seed by hashing, so any subset of the matrix can be reproduced
independently.  The manifest CSV lists every trial with its cell, seed, log
path and outcome.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import replace
from pathlib import Path
from typing import Optional

from .cases import CaseBase, default_casebase
from .simulator import SimConfig, run_trial
from .trial import write_trial_log

MANIFEST_NAME = "manifest.csv"
MANIFEST_FIELDS = ("cell", "scenario", "config", "approach", "trial", "seed", "path", "outcome")


def cell_name(scenario: int, config: str, approach: str) -> str:
    return f"s{scenario}-{config}-{approach}"


def derive_seed(master_seed: int, cell: str, trial: int) -> int:
    digest = hashlib.sha256(f"{master_seed}:{cell}:{trial}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def run_experiment(
    out_dir: str | Path,
    scenarios: list[int],
    config: str,
    approaches: list[str],
    trials_per_cell: int,
    master_seed: int,
    casebase: Optional[CaseBase] = None,
    base_config: Optional[SimConfig] = None,
) -> list[dict]:
    """Run the full matrix and write logs plus the manifest; returns the
    manifest rows."""
    if trials_per_cell < 1:
        raise ValueError("trials_per_cell must be >= 1")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    base = base_config or SimConfig()
    if "cbr" in approaches and casebase is None:
        casebase = default_casebase(base.field)

    rows: list[dict] = []
    for scenario in sorted(scenarios):
        for approach in sorted(approaches):
            cell = cell_name(scenario, config, approach)
            for trial in range(trials_per_cell):
                seed = derive_seed(master_seed, cell, trial)
                cfg = replace(
                    base,
                    scenario=scenario,
                    opponent_config=config,
                    approach=approach,
                    seed=seed,
                )
                log = run_trial(cfg, casebase if approach == "cbr" else None)
                rel_path = f"{cell}-{trial:04d}.jsonl"
                write_trial_log(log, out_dir / rel_path)
                rows.append(
                    {
                        "cell": cell,
                        "scenario": scenario,
                        "config": config,
                        "approach": approach,
                        "trial": trial,
                        "seed": seed,
                        "path": rel_path,
                        "outcome": log.outcome[0] if log.outcome else "",
                    }
                )

    with (out_dir / MANIFEST_NAME).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=MANIFEST_FIELDS)
        writer.writeheader()
        writer.writerows(rows)
    return rows


def read_manifest(logs_dir: str | Path) -> list[dict]:
    path = Path(logs_dir) / MANIFEST_NAME
    if not path.exists():
        raise FileNotFoundError(f"no manifest at {path}")
    with path.open("r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
