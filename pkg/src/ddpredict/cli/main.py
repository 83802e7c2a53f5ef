"""Command line entry point.

Subcommands map one-to-one onto pipeline stages, plus ``reproduce`` which
chains every stage for the four bundled scenario cells.  Exit codes:
0 success, 2 configuration error, 3 I/O or missing artifact, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from ddpredict.cli import stages
from ddpredict.cli.manifest import (
    get_stage,
    load_manifest,
    new_manifest,
    record_stage,
    save_manifest,
)
from ddpredict.cli.stages import CELLS, MODEL_NAMES, Budgets, SMOKE_BUDGETS
from ddpredict.errors import (
    ConfigError,
    DDPredictError,
    MissingArtifactError,
    NumericalError,
)

OUT_ROOT_ENV = "DDPREDICT_OUT_ROOT"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4


def _out_root(args) -> Path:
    out = args.out or os.environ.get(OUT_ROOT_ENV)
    if not out:
        raise ConfigError(f"no output directory: pass --out or set {OUT_ROOT_ENV}")
    return Path(out)


def _manifest_path(args, out_root: Path) -> Path:
    return Path(args.manifest) if args.manifest else out_root / "manifest.json"


def _load_or_new(args, out_root: Path) -> tuple[dict, Path]:
    path = _manifest_path(args, out_root)
    if path.exists():
        return load_manifest(path), path
    budgets = _budgets(args)
    return new_manifest(out_root, budgets.as_dict(), _horizons(args)), path


def _budgets(args) -> Budgets:
    name = getattr(args, "budgets", None) or "desk"
    if name == "desk":
        return Budgets()
    if name == "smoke":
        return SMOKE_BUDGETS
    path = Path(name)
    if not path.exists():
        raise ConfigError(f"--budgets must be 'desk', 'smoke', or a JSON file; got {name!r}")
    with open(path) as fh:
        try:
            return Budgets.from_dict(json.load(fh))
        except (json.JSONDecodeError, TypeError) as exc:
            raise ConfigError(f"bad budgets file {path}: {exc}") from exc


def _manifest_budgets(manifest: dict) -> Budgets:
    return Budgets.from_dict(manifest["budgets"])


def _horizons(args) -> list[int]:
    raw = getattr(args, "horizons", None) or "5,10"
    try:
        values = [int(v) for v in raw.split(",") if v]
    except ValueError as exc:
        raise ConfigError(f"--horizons must be comma-separated integers, got {raw!r}") from exc
    if not values or any(v < 1 for v in values):
        raise ConfigError(f"--horizons must be positive, got {raw!r}")
    return values


def _cell_name(args) -> str:
    if not args.scenario:
        raise ConfigError("this command needs --scenario")
    return Path(args.scenario).stem


def cmd_generate(args) -> int:
    out_root = _out_root(args)
    manifest, mpath = _load_or_new(args, out_root)
    budgets = _manifest_budgets(manifest)
    cell = _cell_name(args)
    scenario = stages.resolve_scenario(args.scenario)
    art = stages.stage_generate(scenario, out_root / "cells" / cell / "traces", args.seed, budgets)
    manifest["scenarios"][cell] = str(scenario)
    record_stage(manifest, "generate", art, cell)
    save_manifest(mpath, manifest)
    print(f"generated {len(art['traces'])} traces for {cell} -> {out_root / 'cells' / cell / 'traces'}")
    return EXIT_OK


def cmd_extract(args) -> int:
    out_root = _out_root(args)
    manifest, mpath = _load_or_new(args, out_root)
    budgets = _manifest_budgets(manifest)
    cell = _cell_name(args)
    gen = get_stage(manifest, "generate", cell)
    art = stages.stage_extract(gen, out_root / "cells" / cell / "extract", budgets)
    record_stage(manifest, "extract", art, cell)
    save_manifest(mpath, manifest)
    print(f"extracted series/windows for {cell} -> {out_root / 'cells' / cell / 'extract'}")
    return EXIT_OK


def cmd_pretrain(args) -> int:
    out_root = _out_root(args)
    manifest, mpath = _load_or_new(args, out_root)
    budgets = _manifest_budgets(manifest)
    if args.epochs:
        budgets = Budgets.from_dict({**budgets.as_dict(), "pretrain_steps": args.epochs})
    art = stages.stage_pretrain(out_root / "pretrain", budgets)
    record_stage(manifest, "pretrain", art)
    manifest["model"] = {
        "kind": "transformer",
        "config": budgets.transformer_config().as_dict(),
    }
    save_manifest(mpath, manifest)
    print(f"pretrained transformer -> {art['checkpoint']}")
    return EXIT_OK


def cmd_train(args) -> int:
    out_root = _out_root(args)
    manifest, mpath = _load_or_new(args, out_root)
    budgets = _manifest_budgets(manifest)
    cell = _cell_name(args)
    extract = get_stage(manifest, "extract", cell)
    pretrain = get_stage(manifest, "pretrain")
    only = None
    if args.model:
        only = "transformer_finetuned" if args.model == "transformer" else args.model
    art = stages.stage_train(
        extract,
        pretrain,
        out_root / "cells" / cell / "train",
        budgets,
        only_model=only,
        max_steps_override=args.epochs,
    )
    existing = manifest["cells"].get(cell, {}).get("train")
    if existing and only is not None:
        existing["checkpoints"].update(art["checkpoints"])
        existing["loss_curves"].update(art["loss_curves"])
        art = existing
    record_stage(manifest, "train", art, cell)
    manifest["train"] = {
        "finetune_lr": budgets.finetune_lr,
        "finetune_steps": args.epochs or budgets.finetune_steps,
        "rnn_lr": budgets.rnn_lr,
        "rnn_steps": args.epochs or budgets.rnn_steps,
        "batch_size": budgets.batch_size,
        "loss": "mae",
    }
    save_manifest(mpath, manifest)
    print(f"trained {len(art['checkpoints'])} checkpoints for {cell}")
    return EXIT_OK


def cmd_eval(args) -> int:
    out_root = _out_root(args)
    manifest, mpath = _load_or_new(args, out_root)
    budgets = _manifest_budgets(manifest)
    cell = _cell_name(args)
    gen = get_stage(manifest, "generate", cell)
    extract = get_stage(manifest, "extract", cell)
    trained = get_stage(manifest, "train", cell)
    pretrain = get_stage(manifest, "pretrain")
    if args.model and args.model not in MODEL_NAMES:
        raise ConfigError(f"--model must be one of {MODEL_NAMES}")
    art = stages.stage_eval(
        extract,
        trained,
        pretrain,
        out_root / "cells" / cell / "eval",
        budgets,
        horizons=tuple(_horizons(args)),
        scenario_name=gen["scenario_name"],
        speed=gen["speed_kmh"],
        only_model=args.model,
    )
    record_stage(manifest, "eval", art, cell)
    save_manifest(mpath, manifest)
    print(f"evaluated {cell}: tables in {out_root / 'cells' / cell / 'eval'}")
    return EXIT_OK


def cmd_report(args) -> int:
    out_root = _out_root(args)
    manifest, mpath = _load_or_new(args, out_root)
    pretrain = get_stage(manifest, "pretrain")
    cell_arts = {}
    for cell, stage_map in manifest["cells"].items():
        need = {"extract", "train", "eval"}
        if need <= set(stage_map):
            cell_arts[cell] = stage_map
    if not cell_arts:
        raise MissingArtifactError("no cell has completed extract+train+eval; nothing to report")
    art = stages.stage_report(
        cell_arts, pretrain, out_root / "report", tuple(_horizons(args))
    )
    record_stage(manifest, "report", art)
    save_manifest(mpath, manifest)
    print(f"report -> {art['report']}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    out_root = _out_root(args)
    budgets = _budgets(args)
    horizons = tuple(_horizons(args))
    cells = tuple(args.scenario.split(",")) if args.scenario else CELLS
    manifest = new_manifest(out_root, budgets.as_dict(), list(horizons))
    mpath = _manifest_path(args, out_root)

    pretrain = stages.stage_pretrain(out_root / "pretrain", budgets)
    record_stage(manifest, "pretrain", pretrain)
    manifest["model"] = {
        "kind": "transformer",
        "config": budgets.transformer_config().as_dict(),
    }
    manifest["train"] = {
        "finetune_lr": budgets.finetune_lr,
        "finetune_steps": budgets.finetune_steps,
        "rnn_lr": budgets.rnn_lr,
        "rnn_steps": budgets.rnn_steps,
        "batch_size": budgets.batch_size,
        "loss": "mae",
    }
    cell_arts = {}
    for cell in cells:
        name = Path(cell).stem
        scenario = stages.resolve_scenario(cell)
        manifest["scenarios"][name] = str(scenario)
        art = stages.run_cell(cell, out_root, pretrain, budgets, horizons=horizons)
        cell_arts[name] = art
        for stage_name in ("generate", "extract", "train", "eval"):
            record_stage(manifest, stage_name, art[stage_name], name)
        save_manifest(mpath, manifest)
        print(f"cell {name} done")
    report = stages.stage_report(cell_arts, pretrain, out_root / "report", horizons)
    record_stage(manifest, "report", report)
    save_manifest(mpath, manifest)
    print(f"reproduce complete: {report['report']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddpredict",
        description="Delay-Doppler channel parameter forecasting workbench.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario=False, model=None, horizons=False, epochs=False):
        p.add_argument("--out", help=f"output root (default ${OUT_ROOT_ENV})")
        p.add_argument("--manifest", help="manifest path (default OUT/manifest.json)")
        p.add_argument(
            "--budgets",
            help="compute budgets: 'desk', 'smoke', or a JSON file (new manifests only)",
        )
        if scenario:
            p.add_argument(
                "--scenario",
                help=f"bundled cell name {CELLS} or a scenario .toml path",
            )
        if model:
            p.add_argument("--model", choices=model, help="restrict to one model")
        if horizons:
            p.add_argument("--horizons", help="comma-separated forecast horizons (default 5,10)")
        if epochs:
            p.add_argument("--epochs", type=int, help="override the number of training steps")

    p = sub.add_parser("generate", help="synthesize channel traces for a scenario")
    common(p, scenario=True)
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("extract", help="extract parameter series and window them")
    common(p, scenario=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("pretrain", help="pre-train the transformer on the synthetic corpus")
    common(p, epochs=True)
    p.set_defaults(func=cmd_pretrain)

    p = sub.add_parser("train", help="fine-tune the transformer and fit baselines")
    common(p, scenario=True, model=("transformer", "lstm", "gru"), epochs=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score models on held-out lanes")
    common(p, scenario=True, model=MODEL_NAMES, horizons=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="merge cell tables and render figures")
    common(p, horizons=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("reproduce", help="run every stage for all scenario cells")
    common(p, scenario=True, horizons=True)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MissingArtifactError as exc:
        print(f"missing artifact: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DDPredictError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
