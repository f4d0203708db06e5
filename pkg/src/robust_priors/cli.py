"""Command-line entry point: ``robust-priors {decide,classify,fmri}``.

Every run writes ``manifest.json`` into the output directory before any
computation, then the result files. Results are first written to temporary
names and renamed once complete, so a failed run leaves no partial CSV.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .datasets import classification_dataset, decision_dataset, read_table
from .errors import ConfigError, DegenerateDirectionError, InputError, NumericalError
from .harness import MODELS, SweepConfig, check_theta_grid, default_theta_grid, run_sweep

log = logging.getLogger("robust_priors")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

THETA_PRESETS = {"default": default_theta_grid}


def parse_theta_grid(text: str) -> np.ndarray:
    """A preset name or a comma-separated list of penalties."""
    if text in THETA_PRESETS:
        return THETA_PRESETS[text]()
    try:
        grid = np.array([float(t) for t in text.split(",") if t.strip()])
    except ValueError:
        raise ConfigError(f"theta grid must be a preset {sorted(THETA_PRESETS)} or numbers, got {text!r}") from None
    if grid.size == 0:
        raise ConfigError("empty theta grid")
    return grid


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return cfg


def _digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".partial")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_manifest(out_dir: Path, subcommand: str, config: dict, seed: int, inputs: list, outputs: list) -> None:
    manifest = {
        "subcommand": subcommand,
        "config": config,
        "seed": seed,
        "inputs": {str(p): _digest(p) for p in inputs},
        "outputs": [str(out_dir / o) for o in outputs],
        "version": __version__,
    }
    _write_atomic(out_dir / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _pick(args, cfg: dict, key: str, default=None):
    v = getattr(args, key, None)
    if v is not None:
        return v
    return cfg.get(key, default)


def _sweep_config(args, cfg: dict, default_train: int) -> SweepConfig:
    grid = args.theta_grid if args.theta_grid is not None else cfg.get("theta_grid", "default")
    if isinstance(grid, str):
        grid = parse_theta_grid(grid)
    try:
        return SweepConfig(
            theta_grid=grid,
            train_size=int(_pick(args, cfg, "train_size", default_train)),
            iterations=int(_pick(args, cfg, "iterations", 1000)),
            seed=int(_pick(args, cfg, "seed", 0)),
            model_set=tuple(cfg.get("models", MODELS)),
            family=_pick(args, cfg, "family", "logistic"),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def _run_sweep_command(args, name: str, target_key: str, default_train: int, build) -> int:
    cfg = _load_config(args.config)
    target = _pick(args, cfg, target_key)
    if target is None:
        raise ConfigError(f"no {target_key} column given (--{target_key} or config key {target_key!r})")
    drop = tuple(args.drop or cfg.get("drop_columns", ()))
    sweep_cfg = _sweep_config(args, cfg, default_train)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = [f"{name}_sweep.csv", f"{name}_summary.json"]
    resolved = {target_key: target, "drop_columns": list(drop), **sweep_cfg.to_dict()}
    if name == "classify":
        resolved["positive_label"] = _pick(args, cfg, "positive_label")
    _write_manifest(out_dir, name, resolved, sweep_cfg.seed, [args.data], outputs)

    table = read_table(args.data, target, drop)
    data = build(table, resolved, sweep_cfg)
    log.info("%s: n=%d rows, m=%d cues (%d rows dropped for missing values)", name, data.n, data.m, table.dropped_rows)
    result = run_sweep(data, sweep_cfg)
    summary = result.summary()
    summary["data"] = {"path": str(args.data), "n": data.n, "m": data.m, "dropped_rows": table.dropped_rows,
                       "cue_names": list(data.cue_names)}
    _write_atomic(out_dir / outputs[0], result.to_csv())
    _write_atomic(out_dir / outputs[1], json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_decide(args) -> int:
    return _run_sweep_command(args, "decide", "criterion", 50,
                              lambda table, resolved, c: decision_dataset(table, c.seed))


def cmd_classify(args) -> int:
    return _run_sweep_command(args, "classify", "label", 100,
                              lambda table, resolved, c: classification_dataset(table, resolved["positive_label"]))


def cmd_fmri(args) -> int:
    from .fmri.config import SimConfig
    from .fmri.experiment import ISI_LEVELS, SNR_LEVELS, run_grid
    from .fmri.io import write_scene_dump
    from .fmri.simulate import simulate

    cfg = _load_config(args.config)
    sim_keys = {k: v for k, v in cfg.items() if k not in ("isi", "snr", "iterations", "theta_grid")}
    if args.seed is not None:
        sim_keys["seed"] = args.seed
    base = SimConfig.from_dict(sim_keys)
    isis = args.isi or cfg.get("isi", list(ISI_LEVELS))
    snrs = args.snr or cfg.get("snr", list(SNR_LEVELS))
    iterations = int(_pick(args, cfg, "iterations", 100))
    if iterations < 1:
        raise ConfigError("iterations must be at least 1")
    grid = args.theta_grid if args.theta_grid is not None else cfg.get("theta_grid", "default")
    grid = parse_theta_grid(grid) if isinstance(grid, str) else np.asarray(grid, dtype=float)
    check_theta_grid(grid)
    for isi in isis:
        for snr in snrs:
            base.with_(ISI=float(isi), sigma2_psi=float(snr))  # validates every cell before any work

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = ["fmri_report.csv"] + (["fmri_raw.csv"] if args.raw else []) + (["scene.bin"] if args.dump_scene else [])
    resolved = {**base.to_dict(), "isi": [float(i) for i in isis], "snr": [float(s) for s in snrs],
                "iterations": iterations, "theta_grid": [float(t) for t in grid]}
    _write_manifest(out_dir, "fmri", resolved, base.seed, [args.config] if args.config else [], outputs)

    report = run_grid(base, iterations, isis, snrs, grid,
                      progress=lambda c: log.info("fmri cell ISI=%g sigma2_psi=%g done", c.cfg.ISI, c.cfg.sigma2_psi))
    _write_atomic(out_dir / "fmri_report.csv", report.to_csv())
    if args.raw:
        _write_atomic(out_dir / "fmri_raw.csv", report.raw_csv())
    if args.dump_scene:
        first = base.with_(ISI=float(isis[0]), sigma2_psi=float(snrs[0]))
        _, scenes = simulate(first, np.random.default_rng([base.seed, 0]))
        write_scene_dump(out_dir / "scene.bin", scenes[0].X_lsa, scenes[0].Psi)
    return EXIT_OK


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with settings; flags override it")
    p.add_argument("--seed", type=int, help="unsigned 64-bit seed")
    p.add_argument("--iterations", type=int)
    p.add_argument("--theta-grid", help="'default' or comma-separated penalties starting at 0")
    p.add_argument("--out-dir", default="results")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robust-priors", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, target, help_ in (("decide", "criterion", "paired-comparison sweep over item pairs"),
                                ("classify", "label", "binary classification sweep")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("data", help="CSV with a header row")
        p.add_argument(f"--{target}", help=f"name of the {target} column")
        p.add_argument("--drop", action="append", help="column to ignore (repeatable)")
        p.add_argument("--train-size", type=int)
        p.add_argument("--family", choices=("logistic", "linear"))
        if name == "classify":
            p.add_argument("--positive-label", type=float, help="label value coded +1 (default: the larger)")
        _common(p)
        p.set_defaults(func=cmd_decide if name == "decide" else cmd_classify)

    p = sub.add_parser("fmri", help="simulated trial-estimation study")
    p.add_argument("--isi", type=float, nargs="+", help="interstimulus intervals (s)")
    p.add_argument("--snr", type=float, nargs="+", help="signal variances sigma2_psi")
    p.add_argument("--raw", action="store_true", help="also write per-iteration RMSEs")
    p.add_argument("--dump-scene", action="store_true", help="write one design matrix and Psi as flat binary")
    _common(p)
    p.set_defaults(func=cmd_fmri)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, DegenerateDirectionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
