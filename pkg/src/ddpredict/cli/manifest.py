"""Experiment manifest: the single JSON record tying a run together.

The manifest names the scenario files, compute budgets, model/train
configuration, and every artifact each stage produced, so any figure or
table can be regenerated from the manifest and the files it references.
"""

from __future__ import annotations

import json
from pathlib import Path

from ddpredict.errors import ConfigError, MissingArtifactError

STAGE_ORDER = ("generate", "extract", "pretrain", "train", "eval", "report")


def new_manifest(out_root: str | Path, budgets: dict, horizons: list[int]) -> dict:
    return {
        "out_root": str(out_root),
        "budgets": budgets,
        "horizons": horizons,
        "model": {},
        "train": {},
        "stage_list": [],
        "scenarios": {},
        "cells": {},
        "pretrain": {},
        "report": {},
    }


def validate_manifest(manifest: dict) -> None:
    """Check required keys and that recorded stages follow pipeline order."""
    for key in ("out_root", "budgets", "cells", "stage_list"):
        if key not in manifest:
            raise ConfigError(f"manifest missing key {key!r}")
    seen = [s for s in manifest["stage_list"] if s in STAGE_ORDER]
    ranks = [STAGE_ORDER.index(s) for s in seen]
    if ranks != sorted(ranks):
        raise ConfigError(f"manifest stages out of pipeline order: {manifest['stage_list']}")
    for stage in manifest["stage_list"]:
        if stage not in STAGE_ORDER:
            raise ConfigError(f"unknown stage {stage!r} in manifest")


def load_manifest(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"manifest not found: {path}")
    with open(path) as fh:
        try:
            manifest = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"manifest {path} is not valid JSON: {exc}") from exc
    validate_manifest(manifest)
    return manifest


def save_manifest(path: str | Path, manifest: dict) -> None:
    validate_manifest(manifest)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")


def record_stage(manifest: dict, stage: str, artifacts: dict, cell: str | None = None) -> None:
    """Attach one stage's artifact dict, keeping the stage list ordered."""
    if stage not in STAGE_ORDER:
        raise ConfigError(f"unknown stage {stage!r}")
    if cell is None:
        manifest[stage] = artifacts
    else:
        manifest["cells"].setdefault(cell, {})[stage] = artifacts
    if stage not in manifest["stage_list"]:
        manifest["stage_list"].append(stage)
        manifest["stage_list"].sort(key=STAGE_ORDER.index)


def get_stage(manifest: dict, stage: str, cell: str | None = None) -> dict:
    """Fetch a recorded stage or fail with a named missing-artifact error."""
    if cell is None:
        art = manifest.get(stage)
        where = f"stage {stage!r}"
    else:
        art = manifest.get("cells", {}).get(cell, {}).get(stage)
        where = f"stage {stage!r} for cell {cell!r}"
    if not art:
        raise MissingArtifactError(f"{where} has not been run (not in manifest)")
    return art
