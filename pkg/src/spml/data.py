"""Multi-label datasets: synthetic generation, corruption, splitting, file I/O.

The synthetic task is a bank of linear separators with quantile-calibrated
thresholds, so the positive rate is controlled directly and the task is
learnable by a small MLP. Single-positive corruption keeps exactly one true
positive per row, chosen uniformly at random, mirroring how fully labeled
data is reduced to the single-positive regime.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, CorruptionError, GenerationError, ParseError, SplitError

MAX_RESAMPLE_ATTEMPTS = 1000

_DATASET_HEADER_RE = re.compile(
    r"^spml-dataset v1 N=(\d+) D=(\d+) L=(\d+) kind=(full|single)$"
)


@dataclass
class SynthConfig:
    """Synthetic generator settings; defaults give the desk-scale benchmark."""

    n_examples: int = 2500
    n_features: int = 20
    n_labels: int = 10
    target_positive_rate: float = 0.3
    noise_std: float = 0.0
    seed: int = 0


@dataclass
class FullDataset:
    """Features plus the full binary label matrix."""

    features: np.ndarray
    labels: np.ndarray

    @property
    def n_labels(self) -> int:
        return self.labels.shape[1]


@dataclass
class SinglePositiveDataset:
    """Features plus one observed positive index per example.

    All categories other than the observed one are unobserved (unknown),
    not negative; only the index of the single confirmed positive is stored.
    """

    features: np.ndarray
    observed_positive: np.ndarray
    n_labels: int


@dataclass
class DatasetSplit:
    """Disjoint train/val/test partitions; val and test keep full labels."""

    train: FullDataset
    val: FullDataset
    test: FullDataset
    fractions: tuple[float, float, float]


def _validate_synth_config(cfg: SynthConfig) -> None:
    if min(cfg.n_examples, cfg.n_features, cfg.n_labels) < 1:
        raise ConfigError("n_examples, n_features and n_labels must all be >= 1")
    if not (0.0 < cfg.target_positive_rate < 1.0):
        raise ConfigError(
            f"target_positive_rate must lie in (0, 1), got {cfg.target_positive_rate}"
        )
    if not (np.isfinite(cfg.noise_std) and cfg.noise_std >= 0.0):
        raise ConfigError(f"noise_std must be a non-negative real, got {cfg.noise_std}")


def generate_synthetic(cfg: SynthConfig) -> FullDataset:
    """Sample features and labels from per-class linear separators.

    Features are i.i.d. standard normal. Each class gets a random unit
    weight vector and a threshold at the (1 - target_positive_rate)
    empirical quantile of its scores, so roughly that fraction of rows is
    positive per class. A row is labeled positive where score + noise
    exceeds the threshold. Rows that end up with zero positives are redrawn
    (features and noise) against the fixed separators until every row has
    at least one positive; a row failing MAX_RESAMPLE_ATTEMPTS redraws
    aborts generation. Deterministic in cfg.seed.
    """
    _validate_synth_config(cfg)
    rng = np.random.default_rng(cfg.seed)
    n, d, l = cfg.n_examples, cfg.n_features, cfg.n_labels
    features = rng.standard_normal((n, d))
    weights = rng.standard_normal((d, l))
    weights /= np.linalg.norm(weights, axis=0, keepdims=True)
    scores = features @ weights
    thresholds = np.quantile(scores, 1.0 - cfg.target_positive_rate, axis=0)
    noise = rng.standard_normal((n, l)) * cfg.noise_std
    labels = (scores + noise > thresholds).astype(np.int8)
    for row in np.flatnonzero(labels.sum(axis=1) == 0):
        for _ in range(MAX_RESAMPLE_ATTEMPTS):
            x_new = rng.standard_normal(d)
            noise_new = rng.standard_normal(l) * cfg.noise_std
            row_labels = (x_new @ weights + noise_new > thresholds).astype(np.int8)
            if row_labels.any():
                features[row] = x_new
                labels[row] = row_labels
                break
        else:
            raise GenerationError(
                f"row {row} still has zero positives after {MAX_RESAMPLE_ATTEMPTS} "
                "redraws; the configuration is infeasible"
            )
    return FullDataset(features=features, labels=labels)


def corrupt_to_single_positive(labels, features, seed: int = 0) -> SinglePositiveDataset:
    """Keep one positive per row, chosen uniformly at random among its positives.

    Features pass through unchanged. Deterministic in `seed`. A row with no
    positive cannot be corrupted and raises an error naming the row.
    """
    y = np.asarray(labels)
    x = np.asarray(features, dtype=np.float64)
    if y.ndim != 2 or x.ndim != 2 or y.shape[0] != x.shape[0]:
        raise CorruptionError(
            f"labels {y.shape} and features {x.shape} must be matrices with equal row counts"
        )
    rng = np.random.default_rng(seed)
    observed = np.empty(y.shape[0], dtype=np.int64)
    for i in range(y.shape[0]):
        positives = np.flatnonzero(y[i])
        if positives.size == 0:
            raise CorruptionError(f"row {i} has zero positive labels and cannot be corrupted")
        observed[i] = positives[rng.integers(positives.size)]
    return SinglePositiveDataset(features=x, observed_positive=observed, n_labels=y.shape[1])


def split_dataset(features, labels, fractions, seed: int = 0) -> DatasetSplit:
    """Seeded shuffle, then contiguous train/val/test partition."""
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or any(f <= 0 for f in fractions):
        raise SplitError(f"fractions must be three positive reals, got {fractions}")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise SplitError(f"fractions must sum to 1 within 1e-9, got sum {sum(fractions)!r}")
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    if x.shape[0] != y.shape[0]:
        raise SplitError(f"features and labels disagree on N: {x.shape[0]} vs {y.shape[0]}")
    n = x.shape[0]
    n_train = int(n * fractions[0])
    n_val = int(n * fractions[1])
    n_test = n - n_train - n_val
    if min(n_train, n_val, n_test) < 1:
        raise SplitError(
            f"split sizes {n_train}/{n_val}/{n_test} from N={n}; every split must be non-empty"
        )
    perm = np.random.default_rng(seed).permutation(n)
    parts = (
        perm[:n_train],
        perm[n_train : n_train + n_val],
        perm[n_train + n_val :],
    )
    train, val, test = (FullDataset(features=x[idx], labels=y[idx]) for idx in parts)
    return DatasetSplit(train=train, val=val, test=test, fractions=fractions)


def save_dataset(path, data: FullDataset | SinglePositiveDataset) -> None:
    """Write the line-oriented text format; value-exact on round trip.

    Header: `spml-dataset v1 N=<n> D=<d> L=<l> kind=<full|single>`, then one
    line per example: comma-separated features, `|`, then either the binary
    label row or the observed positive index. Floats use 17 significant
    digits so float64 values round-trip exactly.
    """
    if isinstance(data, FullDataset):
        kind, n_labels = "full", data.labels.shape[1]
    elif isinstance(data, SinglePositiveDataset):
        kind, n_labels = "single", data.n_labels
    else:
        raise TypeError(f"cannot save object of type {type(data).__name__}")
    features = np.asarray(data.features, dtype=np.float64)
    n, d = features.shape
    lines = [f"spml-dataset v1 N={n} D={d} L={n_labels} kind={kind}"]
    for i in range(n):
        row = ",".join(format(v, ".17g") for v in features[i])
        if kind == "full":
            tail = ",".join(str(int(v)) for v in data.labels[i])
        else:
            tail = str(int(data.observed_positive[i]))
        lines.append(row + "|" + tail)
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def _parse_float(token: str, path, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"bad feature value {token!r}", path=path, line=line_no) from None
    if not np.isfinite(value):
        raise ParseError(f"non-finite feature value {token!r}", path=path, line=line_no)
    return value


def load_dataset(path) -> FullDataset | SinglePositiveDataset:
    """Read a dataset file written by `save_dataset`.

    Lines starting with `#` and blank lines are ignored. Any structural
    problem raises ParseError naming the offending line.
    """
    path = Path(path)
    header = None
    data_lines: list[tuple[int, str]] = []
    with open(path, "r", encoding="ascii") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = (line_no, line)
            else:
                data_lines.append((line_no, line))
    if header is None:
        raise ParseError("file contains no header line", path=path)
    match = _DATASET_HEADER_RE.match(header[1])
    if match is None:
        raise ParseError(f"bad header {header[1]!r}", path=path, line=header[0])
    n, d, l = (int(g) for g in match.groups()[:3])
    kind = match.group(4)
    if min(n, d, l) < 1:
        raise ParseError(f"N, D and L must all be >= 1, got N={n} D={d} L={l}",
                         path=path, line=header[0])
    if len(data_lines) != n:
        raise ParseError(f"header declares N={n} but found {len(data_lines)} data lines",
                         path=path)
    features = np.empty((n, d), dtype=np.float64)
    labels = np.empty((n, l), dtype=np.int8) if kind == "full" else None
    observed = np.empty(n, dtype=np.int64) if kind == "single" else None
    for i, (line_no, line) in enumerate(data_lines):
        parts = line.split("|")
        if len(parts) != 2:
            raise ParseError("expected exactly one '|' separator", path=path, line=line_no)
        feat_tokens = parts[0].split(",")
        if len(feat_tokens) != d:
            raise ParseError(f"expected {d} feature values, found {len(feat_tokens)}",
                             path=path, line=line_no)
        features[i] = [_parse_float(t, path, line_no) for t in feat_tokens]
        if kind == "full":
            label_tokens = parts[1].split(",")
            if len(label_tokens) != l:
                raise ParseError(f"expected {l} label values, found {len(label_tokens)}",
                                 path=path, line=line_no)
            for j, token in enumerate(label_tokens):
                if token not in ("0", "1"):
                    raise ParseError(f"label value {token!r} is not 0 or 1",
                                     path=path, line=line_no)
                labels[i, j] = int(token)
        else:
            try:
                idx = int(parts[1])
            except ValueError:
                raise ParseError(f"bad observed positive index {parts[1]!r}",
                                 path=path, line=line_no) from None
            if not (0 <= idx < l):
                raise ParseError(
                    f"observed positive index {idx} out of range [0, {l})",
                    path=path, line=line_no,
                )
            observed[i] = idx
    if kind == "full":
        return FullDataset(features=features, labels=labels)
    return SinglePositiveDataset(features=features, observed_positive=observed, n_labels=l)
