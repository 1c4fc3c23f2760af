"""Sweep outputs: the results CSV, derived charts, and the run manifest.

`results.csv` is byte-reproducible for identical configurations: rows are
sorted by (seed, tau), floats are written in shortest round-trip form, and
the wall_time_s column is a fixed 0.0 placeholder. Measured timings are
recorded in manifest.json instead, which also carries timestamps and is
therefore not expected to be byte-stable.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .charts import PALETTE, Series, render_line_chart
from .errors import ParseError
from .pipeline import ExperimentConfig, SweepResultRow

RESULTS_CSV_COLUMNS = (
    "seed",
    "tau",
    "avg_pseudo_positives",
    "teacher_map",
    "student_map",
    "an_baseline_map",
    "em_baseline_map",
    "full_supervision_map",
    "wall_time_s",
)

_MEAN_SEED = "mean"


def _fmt(value: float) -> str:
    # Shortest decimal representation that round-trips the exact float64.
    return repr(float(value))


def _row_fields(row: SweepResultRow) -> list[str]:
    return [
        str(row.seed),
        _fmt(row.tau),
        _fmt(row.avg_pseudo_positives),
        _fmt(row.teacher_map),
        _fmt(row.student_map),
        _fmt(row.an_baseline_map),
        _fmt(row.em_baseline_map),
        _fmt(row.full_supervision_map),
        _fmt(0.0),  # deterministic placeholder; real timings live in the manifest
    ]


def per_tau_means(rows: list[SweepResultRow]) -> list[SweepResultRow]:
    """Mean over seeds of every numeric column, one row per tau."""
    taus = sorted({row.tau for row in rows})
    means = []
    for tau in taus:
        group = [r for r in rows if r.tau == tau]
        mean_of = lambda attr: float(np.mean([getattr(r, attr) for r in group]))
        means.append(
            SweepResultRow(
                seed=-1,  # placeholder; serialized as "mean"
                tau=tau,
                avg_pseudo_positives=mean_of("avg_pseudo_positives"),
                teacher_map=mean_of("teacher_map"),
                student_map=mean_of("student_map"),
                an_baseline_map=mean_of("an_baseline_map"),
                em_baseline_map=mean_of("em_baseline_map"),
                full_supervision_map=mean_of("full_supervision_map"),
                wall_time_s=0.0,
            )
        )
    return means


def write_results_csv(path, rows: list[SweepResultRow]) -> None:
    """Write per-seed rows sorted by (seed, tau) plus per-tau mean rows."""
    ordered = sorted(rows, key=lambda r: (r.seed, r.tau))
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULTS_CSV_COLUMNS)
        for row in ordered:
            writer.writerow(_row_fields(row))
        for mean_row in per_tau_means(ordered):
            fields = _row_fields(mean_row)
            fields[0] = _MEAN_SEED
            writer.writerow(fields)


def read_results_csv(path) -> list[SweepResultRow]:
    """Read back the per-seed rows of a results CSV (mean rows are skipped)."""
    path = Path(path)
    rows: list[SweepResultRow] = []
    with open(path, "r", newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("results file is empty", path=path) from None
        if tuple(header) != RESULTS_CSV_COLUMNS:
            raise ParseError(
                f"unexpected results header {header!r}", path=path, line=1
            )
        for line_no, fields in enumerate(reader, start=2):
            if len(fields) != len(RESULTS_CSV_COLUMNS):
                raise ParseError(
                    f"expected {len(RESULTS_CSV_COLUMNS)} fields, found {len(fields)}",
                    path=path, line=line_no,
                )
            if fields[0] == _MEAN_SEED:
                continue
            try:
                rows.append(
                    SweepResultRow(
                        seed=int(fields[0]),
                        tau=float(fields[1]),
                        avg_pseudo_positives=float(fields[2]),
                        teacher_map=float(fields[3]),
                        student_map=float(fields[4]),
                        an_baseline_map=float(fields[5]),
                        em_baseline_map=float(fields[6]),
                        full_supervision_map=float(fields[7]),
                        wall_time_s=float(fields[8]),
                    )
                )
            except ValueError as exc:
                raise ParseError(f"bad numeric field: {exc}", path=path, line=line_no) from None
    if not rows:
        raise ParseError("results file contains no per-seed rows", path=path)
    return rows


def map_vs_tau_svg(rows: list[SweepResultRow]) -> str:
    """Test MAP of every model against tau (means over seeds)."""
    means = per_tau_means(rows)
    taus = [m.tau for m in means]
    series = [
        Series("student (pseudo labels)", taus, [m.student_map for m in means], PALETTE[0]),
        Series("teacher", taus, [m.teacher_map for m in means], PALETTE[4]),
        Series("assume-negative baseline", taus, [m.an_baseline_map for m in means],
               PALETTE[1], dash="6,3"),
        Series("entropy-max baseline", taus, [m.em_baseline_map for m in means],
               PALETTE[2], dash="6,3"),
        Series("full supervision", taus, [m.full_supervision_map for m in means],
               PALETTE[3], dash="2,3"),
    ]
    return render_line_chart(
        series,
        title="Test MAP vs pseudo-label threshold",
        x_label="threshold tau",
        y_label="test mean average precision",
    )


def labels_vs_tau_svg(rows: list[SweepResultRow]) -> str:
    """Average positive pseudo-labels per example against tau (means over seeds)."""
    means = per_tau_means(rows)
    taus = [m.tau for m in means]
    series = [
        Series("pseudo-label positives / example", taus,
               [m.avg_pseudo_positives for m in means], PALETTE[0]),
        Series("single positive (1 / example)", taus, [1.0] * len(taus),
               PALETTE[1], dash="6,3"),
    ]
    return render_line_chart(
        series,
        title="Pseudo-label count vs threshold",
        x_label="threshold tau",
        y_label="avg positive labels per example",
    )


def experiment_config_to_dict(cfg: ExperimentConfig) -> dict:
    """JSON-friendly snapshot of a resolved configuration."""
    out = asdict(cfg)
    out["fractions"] = list(out["fractions"])
    out["tau_grid"] = list(out["tau_grid"])
    out["seeds"] = list(out["seeds"])
    return out


def write_manifest(path, manifest: dict) -> None:
    Path(path).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
