"""Command-line entry point for dataset tooling, training, sweeps and charts.

Subcommands: gen-data, corrupt, train, algorithm1, sweep, eval, plot.
Every command is deterministic given its flags; all randomness flows from
explicit --seed values. Exit codes: 0 success, 1 runtime failure, 2 usage
or validation error. Set SPML_NO_COLOR to disable ANSI styling.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
import time
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, losses
from .data import (
    FullDataset,
    SinglePositiveDataset,
    SynthConfig,
    corrupt_to_single_positive,
    generate_synthetic,
    load_dataset,
    save_dataset,
)
from .errors import (
    ConfigError,
    CorruptionError,
    DimensionError,
    EvaluationError,
    InputError,
    LabelError,
    ParseError,
    SplitError,
    SpmlError,
)
from .metrics import mean_average_precision
from .model import forward, load_model, save_model
from .pipeline import (
    ExperimentConfig,
    TrainConfig,
    run_algorithm1,
    run_sweep_with_artifacts,
    train_model,
)
from .pseudo import avg_positives_per_example
from .report import (
    experiment_config_to_dict,
    labels_vs_tau_svg,
    map_vs_tau_svg,
    read_results_csv,
    write_manifest,
    write_results_csv,
)

# Validation problems exit 2; genuine runtime failures exit 1.
_USAGE_ERRORS = (
    ConfigError,
    ParseError,
    SplitError,
    DimensionError,
    LabelError,
    InputError,
    CorruptionError,
    EvaluationError,
)


def _use_color() -> bool:
    return "SPML_NO_COLOR" not in os.environ and sys.stdout.isatty()


def _bold(text: str) -> str:
    return f"\x1b[1m{text}\x1b[0m" if _use_color() else text


def _green(text: str) -> str:
    return f"\x1b[32m{text}\x1b[0m" if _use_color() else text


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip() != ""]
    except ValueError:
        raise ConfigError(f"{flag} expects comma-separated numbers, got {text!r}") from None


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip() != ""]
    except ValueError:
        raise ConfigError(f"{flag} expects comma-separated integers, got {text!r}") from None


def cmd_gen_data(args) -> int:
    cfg = SynthConfig(
        n_examples=args.n,
        n_features=args.d,
        n_labels=args.l,
        target_positive_rate=args.pos_rate,
        noise_std=args.noise_std,
        seed=args.seed,
    )
    data = generate_synthetic(cfg)
    save_dataset(args.out, data)
    print(f"wrote {args.out}")
    print(f"N={args.n} D={args.d} L={args.l}")
    print(f"avg positives per row: {avg_positives_per_example(data.labels):.4f}")
    return 0


def cmd_corrupt(args) -> int:
    data = load_dataset(args.input)
    if not isinstance(data, FullDataset):
        raise ConfigError(f"{args.input} is already single-positive; corruption needs full labels")
    spml = corrupt_to_single_positive(data.labels, data.features, args.seed)
    save_dataset(args.out, spml)
    print(f"wrote {args.out} (kind=single, N={spml.features.shape[0]}, L={spml.n_labels})")
    return 0


def _train_config_from_args(args, loss_kind: str) -> TrainConfig:
    return TrainConfig(
        loss_kind=loss_kind,
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.lr,
        hidden_units=args.hidden,
        seed=args.seed,
    )


def cmd_train(args) -> int:
    data = load_dataset(args.data)
    cfg = _train_config_from_args(args, args.loss)
    result = train_model(data, cfg, em_alpha=args.em_alpha)
    save_model(args.out, result.model)
    print(f"wrote {args.out}")
    print(f"loss={args.loss} label_source={result.label_source} "
          f"final_train_loss={result.epoch_losses[-1]:.6f}")
    return 0


def cmd_algorithm1(args) -> int:
    data = load_dataset(args.data)
    if not isinstance(data, SinglePositiveDataset):
        raise ConfigError(
            f"{args.data} carries full labels; the pipeline starts from single-positive data "
            "(use the corrupt command first)"
        )
    teacher_cfg = _train_config_from_args(args, args.teacher_loss)
    student_cfg = _train_config_from_args(args, losses.FULL_BCE)
    result = run_algorithm1(
        data, teacher_cfg, student_cfg, args.tau,
        keep_observed_positive=args.keep_observed_positive,
        em_alpha=args.em_alpha,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_model(out / "teacher.mlp", result.teacher)
    save_model(out / "student.mlp", result.student)
    save_dataset(out / "pseudo.txt",
                 FullDataset(features=data.features, labels=result.pseudo_labels))
    print(f"wrote {out / 'teacher.mlp'}, {out / 'student.mlp'}, {out / 'pseudo.txt'}")
    print(f"tau={args.tau} avg pseudo positives per example: "
          f"{avg_positives_per_example(result.pseudo_labels):.4f}")
    return 0


_CONFIG_KEYS = {
    "synth", "data_path", "fractions", "teacher", "student",
    "tau_grid", "keep_observed_positive", "seeds", "em_alpha",
}
_SYNTH_KEYS = {"n_examples", "n_features", "n_labels", "target_positive_rate",
               "noise_std", "seed"}
_TRAIN_KEYS = {"loss_kind", "epochs", "batch_size", "learning_rate", "hidden_units", "seed"}


def _config_from_file(path: str) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", path=path) from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must hold a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys in {path}: {sorted(unknown)}")
    cfg = ExperimentConfig()
    if "synth" in raw:
        if raw["synth"] is None:
            cfg = replace(cfg, synth=None)
        else:
            bad = set(raw["synth"]) - _SYNTH_KEYS
            if bad:
                raise ConfigError(f"unknown synth keys: {sorted(bad)}")
            cfg = replace(cfg, synth=SynthConfig(**raw["synth"]))
    for section in ("teacher", "student"):
        if section in raw:
            bad = set(raw[section]) - _TRAIN_KEYS
            if bad:
                raise ConfigError(f"unknown {section} keys: {sorted(bad)}")
            cfg = replace(cfg, **{section: replace(getattr(cfg, section), **raw[section])})
    simple = {
        k: raw[k]
        for k in ("data_path", "keep_observed_positive", "em_alpha")
        if k in raw
    }
    if "fractions" in raw:
        simple["fractions"] = tuple(raw["fractions"])
    if "tau_grid" in raw:
        simple["tau_grid"] = tuple(raw["tau_grid"])
    if "seeds" in raw:
        simple["seeds"] = tuple(raw["seeds"])
    cfg = replace(cfg, **simple)
    if cfg.data_path is not None and "synth" not in raw:
        cfg = replace(cfg, synth=None)
    return cfg


def _resolve_sweep_config(args) -> ExperimentConfig:
    cfg = _config_from_file(args.config) if args.config else ExperimentConfig()
    if args.data is not None:
        cfg = replace(cfg, data_path=args.data, synth=None)
    synth_overrides = {}
    for flag, key in (("n", "n_examples"), ("d", "n_features"), ("l", "n_labels"),
                      ("pos_rate", "target_positive_rate"), ("noise_std", "noise_std")):
        value = getattr(args, flag)
        if value is not None:
            synth_overrides[key] = value
    if synth_overrides:
        if cfg.synth is None:
            raise ConfigError("synthetic-data flags conflict with --data / data_path")
        cfg = replace(cfg, synth=replace(cfg.synth, **synth_overrides))
    train_overrides = {}
    for flag, key in (("epochs", "epochs"), ("batch_size", "batch_size"),
                      ("lr", "learning_rate"), ("hidden", "hidden_units")):
        value = getattr(args, flag)
        if value is not None:
            train_overrides[key] = value
    if train_overrides:
        cfg = replace(
            cfg,
            teacher=replace(cfg.teacher, **train_overrides),
            student=replace(cfg.student, **train_overrides),
        )
    if args.teacher_loss is not None:
        cfg = replace(cfg, teacher=replace(cfg.teacher, loss_kind=args.teacher_loss))
    if args.tau_grid is not None:
        cfg = replace(cfg, tau_grid=tuple(_parse_float_list(args.tau_grid, "--tau-grid")))
    if args.seeds is not None:
        cfg = replace(cfg, seeds=tuple(_parse_int_list(args.seeds, "--seeds")))
    if args.fractions is not None:
        fractions = _parse_float_list(args.fractions, "--fractions")
        if len(fractions) != 3:
            raise ConfigError(f"--fractions expects three values, got {len(fractions)}")
        cfg = replace(cfg, fractions=tuple(fractions))
    if args.em_alpha is not None:
        cfg = replace(cfg, em_alpha=args.em_alpha)
    if args.keep_observed_positive:
        cfg = replace(cfg, keep_observed_positive=True)
    return cfg


def _tau_tag(tau: float) -> str:
    return format(float(tau), "g")


def cmd_sweep(args) -> int:
    cfg = _resolve_sweep_config(args)
    started = time.perf_counter()
    rows, artifacts = run_sweep_with_artifacts(cfg)
    total_s = time.perf_counter() - started

    out = Path(args.out)
    charts_dir = out / "charts"
    ckpt_dir = out / "checkpoints"
    pseudo_dir = out / "pseudo"
    created: list[Path] = []
    try:
        for directory in (out, charts_dir, ckpt_dir, pseudo_dir):
            if not directory.exists():
                directory.mkdir(parents=True)
                created.append(directory)

        def _write(path: Path, writer) -> Path:
            created.append(path)
            writer(path)
            return path

        results_csv = _write(out / "results.csv", lambda p: write_results_csv(p, rows))
        chart_map = _write(charts_dir / "map_vs_tau.svg",
                           lambda p: p.write_text(map_vs_tau_svg(rows), encoding="ascii"))
        chart_labels = _write(charts_dir / "labels_vs_tau.svg",
                              lambda p: p.write_text(labels_vs_tau_svg(rows), encoding="ascii"))
        checkpoints = []
        for per_seed in artifacts.per_seed:
            for name, result in (
                ("teacher", per_seed.teacher),
                ("an_baseline", per_seed.an_baseline),
                ("em_baseline", per_seed.em_baseline),
                ("skyline", per_seed.skyline),
            ):
                path = ckpt_dir / f"{name}_seed{per_seed.seed}.mlp"
                checkpoints.append(_write(path, lambda p, r=result: save_model(p, r.model)))
        pseudo_files = []
        spml_by_seed = {a.seed: a.spml for a in artifacts.per_seed}
        for cell in artifacts.cells:
            path = ckpt_dir / f"student_seed{cell.seed}_tau{_tau_tag(cell.tau)}.mlp"
            checkpoints.append(_write(path, lambda p, c=cell: save_model(p, c.student.model)))
            pseudo_path = pseudo_dir / f"pseudo_seed{cell.seed}_tau{_tau_tag(cell.tau)}.txt"
            pseudo_files.append(
                _write(
                    pseudo_path,
                    lambda p, c=cell: save_dataset(
                        p,
                        FullDataset(features=spml_by_seed[c.seed].features,
                                    labels=c.pseudo_labels),
                    ),
                )
            )
        manifest = {
            "tool": "spml",
            "version": __version__,
            "command": "sweep",
            "created_utc": datetime.now(timezone.utc).isoformat(),
            "config": experiment_config_to_dict(cfg),
            "artifacts": {
                "results_csv": str(results_csv.relative_to(out)),
                "charts": [str(chart_map.relative_to(out)),
                           str(chart_labels.relative_to(out))],
                "checkpoints": [str(p.relative_to(out)) for p in checkpoints],
                "pseudo_datasets": [str(p.relative_to(out)) for p in pseudo_files],
            },
            "timings": {
                "total_s": total_s,
                "cells": [
                    {"seed": r.seed, "tau": r.tau, "wall_time_s": r.wall_time_s}
                    for r in rows
                ],
            },
        }
        manifest_path = out / "manifest.json"
        _write(manifest_path, lambda p: write_manifest(p, manifest))
    except BaseException:
        # Remove partial outputs so a failed run leaves nothing half-written.
        for path in reversed(created):
            try:
                if path.is_dir():
                    shutil.rmtree(path, ignore_errors=True)
                else:
                    path.unlink(missing_ok=True)
            except OSError:
                pass
        raise
    print(_green(f"sweep complete: {len(rows)} rows in {total_s:.1f}s"))
    print(f"results: {results_csv}")
    print(f"manifest: {manifest_path}")
    return 0


def cmd_eval(args) -> int:
    model = load_model(args.checkpoint)
    data = load_dataset(args.data)
    if not isinstance(data, FullDataset):
        raise ConfigError(f"{args.data} is single-positive; evaluation needs full labels")
    n_features, n_labels = data.features.shape[1], data.labels.shape[1]
    if (model.n_features, model.n_labels) != (n_features, n_labels):
        raise DimensionError(
            f"checkpoint expects D={model.n_features} L={model.n_labels}; "
            f"dataset has D={n_features} L={n_labels}"
        )
    report = mean_average_precision(forward(model, data.features), data.labels)
    print(_bold(f"MAP: {report.map!r}"))
    print(f"classes evaluated: {report.n_classes_evaluated}/{len(report.per_class_ap)}")
    for j, ap in enumerate(report.per_class_ap):
        status = repr(float(ap)) if not np.isnan(ap) else "undefined (no positives)"
        print(f"class {j}: AP={status}")
    if args.per_class_csv:
        with open(args.per_class_csv, "w", newline="", encoding="ascii") as fh:
            fh.write("class,ap\r\n")
            for j, ap in enumerate(report.per_class_ap):
                fh.write(f"{j},{repr(float(ap))}\r\n")
        print(f"wrote {args.per_class_csv}")
    return 0


def cmd_plot(args) -> int:
    rows = read_results_csv(args.results)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "map_vs_tau.svg").write_text(map_vs_tau_svg(rows), encoding="ascii")
    (out_dir / "labels_vs_tau.svg").write_text(labels_vs_tau_svg(rows), encoding="ascii")
    print(f"wrote {out_dir / 'map_vs_tau.svg'} and {out_dir / 'labels_vs_tau.svg'}")
    return 0


def _add_train_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--epochs", type=int, default=40)
    parser.add_argument("--batch-size", type=int, default=64)
    parser.add_argument("--lr", type=float, default=3e-3, help="learning rate")
    parser.add_argument("--hidden", type=int, default=64, help="hidden units")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--em-alpha", type=float, default=losses.DEFAULT_EM_ALPHA,
                        help="entropy term weight for the em loss")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spml",
        description="Teacher-student pseudo multi-labels for single-positive "
                    "multi-label learning.",
    )
    parser.add_argument("--version", action="version", version=f"spml {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate a synthetic fully-labeled dataset")
    p.add_argument("--n", type=int, default=2500, help="number of examples")
    p.add_argument("--d", type=int, default=20, help="feature dimension")
    p.add_argument("--l", type=int, default=10, help="label count")
    p.add_argument("--pos-rate", type=float, default=0.3, help="target per-class positive rate")
    p.add_argument("--noise-std", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("corrupt", help="reduce full labels to one observed positive per row")
    p.add_argument("input", help="kind=full dataset file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("train", help="train a single model with any loss")
    p.add_argument("--data", required=True,
                   help="dataset file (kind must match the loss: an/em need single, "
                        "full_bce needs full)")
    p.add_argument("--loss", required=True, choices=list(losses.LOSS_KINDS))
    _add_train_flags(p)
    p.add_argument("-o", "--out", required=True, help="checkpoint output path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("algorithm1",
                       help="teacher -> pseudo-labels -> student on single-positive data")
    p.add_argument("--data", required=True, help="kind=single dataset file")
    p.add_argument("--tau", type=float, required=True, help="pseudo-label threshold in [0,1)")
    p.add_argument("--teacher-loss", choices=list(losses.SPML_LOSS_KINDS), default=losses.EM)
    p.add_argument("--keep-observed-positive", action="store_true",
                   help="force each row's observed positive into the pseudo labels")
    _add_train_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_algorithm1)

    p = sub.add_parser("sweep", help="full tau sweep with baselines and skyline")
    p.add_argument("--config", help="JSON experiment config; flags override it")
    p.add_argument("--data", help="kind=full dataset file instead of synthetic data")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--pos-rate", type=float, dest="pos_rate")
    p.add_argument("--noise-std", type=float, dest="noise_std")
    p.add_argument("--fractions", help="train,val,test e.g. 0.8,0.1,0.1")
    p.add_argument("--seeds", help="comma-separated sweep seeds")
    p.add_argument("--tau-grid", dest="tau_grid", help="comma-separated thresholds")
    p.add_argument("--teacher-loss", dest="teacher_loss",
                   choices=list(losses.SPML_LOSS_KINDS))
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int, dest="batch_size")
    p.add_argument("--lr", type=float)
    p.add_argument("--hidden", type=int)
    p.add_argument("--em-alpha", type=float, dest="em_alpha")
    p.add_argument("--keep-observed-positive", action="store_true")
    p.add_argument("--out", required=True, help="run directory")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a fully-labeled dataset")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True, help="kind=full dataset file")
    p.add_argument("--per-class-csv", help="also write per-class AP as CSV")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("plot", help="re-render charts from an existing results.csv")
    p.add_argument("--results", required=True, help="path to results.csv")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SpmlError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
