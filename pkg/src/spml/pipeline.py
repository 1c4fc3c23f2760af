"""Teacher-student pipeline: SPML training, pseudo-label distillation, sweeps.

The experiment harness mirrors the single-positive protocol: full labels are
generated (or loaded), only the train partition is corrupted to a single
positive per example, and every model is evaluated on the uncorrupted test
partition. Baselines (assume-negative, entropy-maximization) and the
full-supervision skyline are trained once per seed and reused across the
threshold grid, since none of them depend on tau.

Label hygiene is recorded explicitly: every training run tags the kind of
labels it consumed ("single_positive", "pseudo" or "full"), and the sweep
asserts that the student never saw true full labels and that baselines never
saw more than the single positive.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from . import losses
from .data import (
    DatasetSplit,
    FullDataset,
    SinglePositiveDataset,
    SynthConfig,
    corrupt_to_single_positive,
    generate_synthetic,
    load_dataset,
    split_dataset,
)
from .errors import ConfigError, TrainingError
from .metrics import mean_average_precision
from .model import (
    MlpModel,
    adam_step,
    backward,
    forward,
    forward_with_cache,
    init_adam,
    init_model,
)
from .pseudo import avg_positives_per_example, make_pseudo_labels

DEFAULT_TAU_GRID = (0.55, 0.65, 0.75, 0.85, 0.95)
DEFAULT_SEEDS = (0, 1, 2)

LABEL_SOURCES = ("single_positive", "pseudo", "full")


@dataclass
class TrainConfig:
    """Hyperparameters of one training run."""

    loss_kind: str
    epochs: int = 40
    batch_size: int = 64
    learning_rate: float = 3e-3
    hidden_units: int = 64
    seed: int = 0


@dataclass
class TrainResult:
    """Trained model plus an audit trail of what it was trained on."""

    model: MlpModel
    label_source: str
    epoch_losses: list[float]


@dataclass
class Algorithm1Result:
    """Teacher, its thresholded pseudo-labels, and the distilled student."""

    teacher: MlpModel
    pseudo_labels: np.ndarray
    student: MlpModel


@dataclass
class ExperimentConfig:
    """Full sweep configuration: data source, model configs, tau grid, seeds.

    Exactly one of `synth` or `data_path` must be set. The teacher trains
    with an SPML loss (an/em); the student always trains with full_bce on
    the pseudo-labels. Baselines reuse the teacher's hyperparameters with
    the loss swapped; the skyline reuses the student's hyperparameters on
    the true labels. Within a sweep, all per-seed randomness (generation,
    split, corruption, model init/shuffling) is derived from each entry of
    `seeds`, overriding the seed fields nested in `synth` and the train
    configs.
    """

    synth: SynthConfig | None = field(default_factory=SynthConfig)
    data_path: str | None = None
    fractions: tuple[float, float, float] = (0.8, 0.1, 0.1)
    teacher: TrainConfig = field(default_factory=lambda: TrainConfig(loss_kind=losses.EM))
    student: TrainConfig = field(default_factory=lambda: TrainConfig(loss_kind=losses.FULL_BCE))
    tau_grid: tuple[float, ...] = DEFAULT_TAU_GRID
    keep_observed_positive: bool = False
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    em_alpha: float = losses.DEFAULT_EM_ALPHA


@dataclass
class SweepResultRow:
    """One (seed, tau) cell: pseudo-label stats and test MAP of every model."""

    seed: int
    tau: float
    avg_pseudo_positives: float
    teacher_map: float
    student_map: float
    an_baseline_map: float
    em_baseline_map: float
    full_supervision_map: float
    wall_time_s: float


class SeedStreams(NamedTuple):
    """Independent per-purpose seeds derived from one sweep seed."""

    synth: int
    split: int
    corrupt: int
    model: int


@dataclass
class SeedArtifacts:
    """Per-seed intermediates kept for persistence and inspection."""

    seed: int
    split: DatasetSplit
    spml: SinglePositiveDataset
    teacher: TrainResult
    an_baseline: TrainResult
    em_baseline: TrainResult
    skyline: TrainResult


@dataclass
class CellArtifacts:
    """Per-(seed, tau) intermediates: the pseudo-labels and the student."""

    seed: int
    tau: float
    pseudo_labels: np.ndarray
    student: TrainResult


@dataclass
class SweepArtifacts:
    per_seed: list[SeedArtifacts]
    cells: list[CellArtifacts]


def derive_seed_streams(seed: int) -> SeedStreams:
    """Spawn stable, independent child seeds for each randomized stage."""
    children = np.random.SeedSequence(seed).spawn(4)
    return SeedStreams(*(int(c.generate_state(1, np.uint64)[0]) for c in children))


def _validate_train_config(cfg: TrainConfig) -> None:
    if cfg.loss_kind not in losses.LOSS_KINDS:
        raise ConfigError(f"unknown loss kind {cfg.loss_kind!r}; expected one of {losses.LOSS_KINDS}")
    if cfg.epochs < 1 or cfg.batch_size < 1 or cfg.hidden_units < 1:
        raise ConfigError("epochs, batch_size and hidden_units must all be >= 1")
    if not (cfg.learning_rate > 0 and np.isfinite(cfg.learning_rate)):
        raise ConfigError(f"learning_rate must be a positive real, got {cfg.learning_rate}")


def _batch_loss(kind: str, probs, targets, batch_idx, em_alpha: float) -> losses.LossOutput:
    if kind == losses.FULL_BCE:
        return losses.bce_full(probs, targets[batch_idx])
    if kind == losses.AN:
        return losses.an_loss(probs, targets[batch_idx])
    return losses.em_loss(probs, targets[batch_idx], alpha=em_alpha)


def train_model(
    dataset: SinglePositiveDataset | FullDataset,
    cfg: TrainConfig,
    em_alpha: float = losses.DEFAULT_EM_ALPHA,
    label_source: str | None = None,
) -> TrainResult:
    """Train an MLP on the given dataset with seeded per-epoch shuffling.

    SPML losses (an/em) require a SinglePositiveDataset; full_bce requires a
    FullDataset. `label_source` tags what kind of labels the model consumed;
    it is inferred as "single_positive" for SPML data and defaults to "full"
    for label matrices (pass "pseudo" when training on pseudo-labels).
    Deterministic in (dataset, cfg).
    """
    _validate_train_config(cfg)
    if isinstance(dataset, SinglePositiveDataset):
        if cfg.loss_kind not in losses.SPML_LOSS_KINDS:
            raise ConfigError(
                f"loss {cfg.loss_kind!r} needs full labels; single-positive data supports "
                f"{losses.SPML_LOSS_KINDS}"
            )
        features, targets, n_labels = dataset.features, dataset.observed_positive, dataset.n_labels
        source = label_source or "single_positive"
        if source != "single_positive":
            raise ConfigError(f"single-positive data cannot be tagged {source!r}")
    elif isinstance(dataset, FullDataset):
        if cfg.loss_kind != losses.FULL_BCE:
            raise ConfigError(
                f"loss {cfg.loss_kind!r} expects single-positive data; full label matrices "
                "train with full_bce"
            )
        features, targets, n_labels = dataset.features, dataset.labels, dataset.labels.shape[1]
        source = label_source or "full"
        if source not in ("full", "pseudo"):
            raise ConfigError(f"full-label data cannot be tagged {source!r}")
    else:
        raise ConfigError(f"cannot train on object of type {type(dataset).__name__}")
    n = features.shape[0]
    if cfg.batch_size > n:
        raise ConfigError(f"batch_size {cfg.batch_size} exceeds training set size {n}")

    init_ss, shuffle_ss = np.random.SeedSequence(cfg.seed).spawn(2)
    model = init_model(
        features.shape[1], cfg.hidden_units, n_labels,
        seed=int(init_ss.generate_state(1, np.uint64)[0]),
    )
    state = init_adam(model, cfg.learning_rate)
    shuffle_rng = np.random.default_rng(shuffle_ss)
    epoch_losses: list[float] = []
    for epoch in range(cfg.epochs):
        perm = shuffle_rng.permutation(n)
        for batch_no, start in enumerate(range(0, n, cfg.batch_size)):
            idx = perm[start : start + cfg.batch_size]
            probs, cache = forward_with_cache(model, features[idx])
            out = _batch_loss(cfg.loss_kind, probs, targets, idx, em_alpha)
            if not np.isfinite(out.value):
                raise TrainingError(
                    f"non-finite loss {out.value} at epoch {epoch}, batch {batch_no}"
                )
            grads = backward(model, cache, out.dloss_dlogits)
            model, state = adam_step(model, grads, state)
        full_out = _batch_loss(
            cfg.loss_kind, forward(model, features), targets, slice(None), em_alpha
        )
        epoch_losses.append(full_out.value)
    return TrainResult(model=model, label_source=source, epoch_losses=epoch_losses)


def train_teacher(
    spml: SinglePositiveDataset, cfg: TrainConfig, em_alpha: float = losses.DEFAULT_EM_ALPHA
) -> TrainResult:
    """Train the teacher on single-positive data; loss must be an SPML loss."""
    if cfg.loss_kind not in losses.SPML_LOSS_KINDS:
        raise ConfigError(
            f"teacher loss must be one of {losses.SPML_LOSS_KINDS}, got {cfg.loss_kind!r}"
        )
    return train_model(spml, cfg, em_alpha=em_alpha)


def distill_student(
    teacher: MlpModel,
    spml: SinglePositiveDataset,
    student_cfg: TrainConfig,
    tau: float,
    keep_observed_positive: bool = False,
) -> tuple[np.ndarray, TrainResult]:
    """Threshold teacher predictions on the training set and train the student."""
    if student_cfg.loss_kind != losses.FULL_BCE:
        raise ConfigError(f"student loss must be {losses.FULL_BCE!r}, got {student_cfg.loss_kind!r}")
    teacher_probs = forward(teacher, spml.features)
    pseudo = make_pseudo_labels(
        teacher_probs, tau,
        observed=spml.observed_positive,
        keep_observed_positive=keep_observed_positive,
    )
    student = train_model(
        FullDataset(features=spml.features, labels=pseudo), student_cfg, label_source="pseudo"
    )
    return pseudo, student


def run_algorithm1(
    spml: SinglePositiveDataset,
    teacher_cfg: TrainConfig,
    student_cfg: TrainConfig,
    tau: float,
    keep_observed_positive: bool = False,
    em_alpha: float = losses.DEFAULT_EM_ALPHA,
) -> Algorithm1Result:
    """Teacher training, thresholded pseudo-labeling, student training, in order."""
    teacher = train_teacher(spml, teacher_cfg, em_alpha=em_alpha)
    pseudo, student = distill_student(
        teacher.model, spml, student_cfg, tau, keep_observed_positive=keep_observed_positive
    )
    return Algorithm1Result(
        teacher=teacher.model, pseudo_labels=pseudo, student=student.model
    )


def _validate_experiment_config(cfg: ExperimentConfig) -> None:
    if (cfg.synth is None) == (cfg.data_path is None):
        raise ConfigError("exactly one of synth and data_path must be set")
    if len(cfg.tau_grid) == 0:
        raise ConfigError("tau_grid must be non-empty")
    taus = tuple(float(t) for t in cfg.tau_grid)
    if any(not (0.0 <= t < 1.0) for t in taus):
        raise ConfigError(f"every tau must lie in [0, 1), got {taus}")
    if any(b <= a for a, b in zip(taus, taus[1:])):
        raise ConfigError(f"tau_grid must be strictly increasing, got {taus}")
    if len(cfg.seeds) == 0:
        raise ConfigError("seeds must be non-empty")
    if cfg.teacher.loss_kind not in losses.SPML_LOSS_KINDS:
        raise ConfigError(
            f"teacher loss must be one of {losses.SPML_LOSS_KINDS}, got {cfg.teacher.loss_kind!r}"
        )
    if cfg.student.loss_kind != losses.FULL_BCE:
        raise ConfigError(
            f"student loss must be {losses.FULL_BCE!r}, got {cfg.student.loss_kind!r}"
        )
    if not (np.isfinite(cfg.em_alpha) and cfg.em_alpha >= 0.0):
        raise ConfigError(f"em_alpha must be a finite non-negative real, got {cfg.em_alpha}")


def _load_full_data(cfg: ExperimentConfig, synth_seed: int) -> FullDataset:
    if cfg.data_path is not None:
        data = load_dataset(cfg.data_path)
        if not isinstance(data, FullDataset):
            raise ConfigError(
                f"{cfg.data_path} holds single-positive data; sweeps need full labels "
                "(the harness corrupts the train split itself)"
            )
        return data
    return generate_synthetic(replace(cfg.synth, seed=synth_seed))


def _test_map(model: MlpModel, test: FullDataset) -> float:
    return mean_average_precision(forward(model, test.features), test.labels).map


def run_sweep_with_artifacts(cfg: ExperimentConfig) -> tuple[list[SweepResultRow], SweepArtifacts]:
    """Run the full experiment grid, returning result rows plus intermediates.

    Per seed: generate/split/corrupt data, train both baselines and the
    skyline once, then run the distillation for each tau. Rows are sorted by
    (seed, tau). `wall_time_s` holds the measured tau-specific work (pseudo
    labeling, student training, student evaluation) per cell.
    """
    _validate_experiment_config(cfg)
    rows: list[SweepResultRow] = []
    artifacts = SweepArtifacts(per_seed=[], cells=[])
    for seed in cfg.seeds:
        streams = derive_seed_streams(int(seed))
        full = _load_full_data(cfg, streams.synth)
        split = split_dataset(full.features, full.labels, cfg.fractions, streams.split)
        spml = corrupt_to_single_positive(split.train.labels, split.train.features, streams.corrupt)

        an_res = train_model(
            spml, replace(cfg.teacher, loss_kind=losses.AN, seed=streams.model), cfg.em_alpha
        )
        em_res = train_model(
            spml, replace(cfg.teacher, loss_kind=losses.EM, seed=streams.model), cfg.em_alpha
        )
        teacher_res = em_res if cfg.teacher.loss_kind == losses.EM else an_res
        skyline_res = train_model(
            split.train,
            replace(cfg.student, loss_kind=losses.FULL_BCE, seed=streams.model),
            label_source="full",
        )
        _audit_label_sources(teacher=teacher_res, an=an_res, em=em_res, skyline=skyline_res)

        teacher_map = _test_map(teacher_res.model, split.test)
        an_map = _test_map(an_res.model, split.test)
        em_map = _test_map(em_res.model, split.test)
        skyline_map = _test_map(skyline_res.model, split.test)
        artifacts.per_seed.append(
            SeedArtifacts(
                seed=int(seed), split=split, spml=spml, teacher=teacher_res,
                an_baseline=an_res, em_baseline=em_res, skyline=skyline_res,
            )
        )

        teacher_probs = forward(teacher_res.model, spml.features)
        student_cfg = replace(cfg.student, seed=streams.model)
        for tau in cfg.tau_grid:
            started = time.perf_counter()
            pseudo = make_pseudo_labels(
                teacher_probs, float(tau),
                observed=spml.observed_positive,
                keep_observed_positive=cfg.keep_observed_positive,
            )
            student_res = train_model(
                FullDataset(features=spml.features, labels=pseudo),
                student_cfg,
                label_source="pseudo",
            )
            if student_res.label_source != "pseudo":
                raise TrainingError("label hygiene violation: student not tagged 'pseudo'")
            student_map = _test_map(student_res.model, split.test)
            wall = time.perf_counter() - started
            rows.append(
                SweepResultRow(
                    seed=int(seed),
                    tau=float(tau),
                    avg_pseudo_positives=avg_positives_per_example(pseudo),
                    teacher_map=teacher_map,
                    student_map=student_map,
                    an_baseline_map=an_map,
                    em_baseline_map=em_map,
                    full_supervision_map=skyline_map,
                    wall_time_s=wall,
                )
            )
            artifacts.cells.append(
                CellArtifacts(seed=int(seed), tau=float(tau), pseudo_labels=pseudo,
                              student=student_res)
            )
    rows.sort(key=lambda r: (r.seed, r.tau))
    return rows, artifacts


def _audit_label_sources(**results: TrainResult) -> None:
    expected = {"teacher": "single_positive", "an": "single_positive",
                "em": "single_positive", "skyline": "full"}
    for name, result in results.items():
        if result.label_source != expected[name]:
            raise TrainingError(
                f"label hygiene violation: {name} consumed {result.label_source!r}, "
                f"expected {expected[name]!r}"
            )


def run_sweep(cfg: ExperimentConfig) -> list[SweepResultRow]:
    """Run the experiment grid and return one row per (seed, tau)."""
    return run_sweep_with_artifacts(cfg)[0]
