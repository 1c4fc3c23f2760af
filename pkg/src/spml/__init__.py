"""Pseudo multi-labels for single-positive multi-label (SPML) learning.

A desk-scale teacher-student pipeline: train a teacher on single-positive
data with an SPML loss (assume-negative or entropy-maximization), threshold
its predictions at tau into hard pseudo multi-labels, and train a student on
them under full supervision. Includes a learnable synthetic benchmark,
ranking metrics (MAP), a sweep harness over tau, and a CLI.
"""

__version__ = "0.1.0"

from .data import (
    DatasetSplit,
    FullDataset,
    SinglePositiveDataset,
    SynthConfig,
    corrupt_to_single_positive,
    generate_synthetic,
    load_dataset,
    save_dataset,
    split_dataset,
)
from .losses import (
    AN,
    DEFAULT_EM_ALPHA,
    EM,
    FULL_BCE,
    LOSS_KINDS,
    LossOutput,
    an_loss,
    bce_full,
    em_loss,
    expand_single_positive,
)
from .metrics import EvalReport, average_precision, mean_average_precision
from .model import (
    PROB_EPS,
    AdamState,
    ForwardCache,
    Gradients,
    MlpModel,
    adam_step,
    backward,
    forward,
    forward_with_cache,
    init_adam,
    init_model,
    load_model,
    save_model,
)
from .pipeline import (
    Algorithm1Result,
    ExperimentConfig,
    SweepResultRow,
    TrainConfig,
    TrainResult,
    derive_seed_streams,
    distill_student,
    run_algorithm1,
    run_sweep,
    run_sweep_with_artifacts,
    train_model,
    train_teacher,
)
from .pseudo import avg_positives_per_example, make_pseudo_labels

__all__ = [
    "__version__",
    "AN",
    "AdamState",
    "Algorithm1Result",
    "DEFAULT_EM_ALPHA",
    "DatasetSplit",
    "EM",
    "EvalReport",
    "ExperimentConfig",
    "ForwardCache",
    "FULL_BCE",
    "FullDataset",
    "Gradients",
    "LOSS_KINDS",
    "LossOutput",
    "MlpModel",
    "PROB_EPS",
    "SinglePositiveDataset",
    "SweepResultRow",
    "SynthConfig",
    "TrainConfig",
    "TrainResult",
    "adam_step",
    "an_loss",
    "average_precision",
    "avg_positives_per_example",
    "backward",
    "bce_full",
    "corrupt_to_single_positive",
    "derive_seed_streams",
    "distill_student",
    "em_loss",
    "expand_single_positive",
    "forward",
    "forward_with_cache",
    "generate_synthetic",
    "init_adam",
    "init_model",
    "load_dataset",
    "load_model",
    "make_pseudo_labels",
    "mean_average_precision",
    "run_algorithm1",
    "run_sweep",
    "run_sweep_with_artifacts",
    "save_dataset",
    "save_model",
    "split_dataset",
    "train_model",
    "train_teacher",
]
