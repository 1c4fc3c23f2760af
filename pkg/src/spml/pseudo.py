"""Hard pseudo-labels from teacher probabilities via a confidence threshold."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, DimensionError, InputError, LabelError


def make_pseudo_labels(
    probs,
    tau: float,
    observed=None,
    keep_observed_positive: bool = False,
) -> np.ndarray:
    """Threshold predictions into binary labels: 1 iff prob > tau (strictly).

    An entry exactly equal to tau becomes 0. With `keep_observed_positive`,
    each row's observed positive index is forced to 1 regardless of the
    teacher's score; `observed` is required in that case.

    Accepts any matrix with entries in [0, 1], so thresholding its own
    output at any tau in (0, 1) is a no-op.
    """
    if not (np.isfinite(tau) and 0.0 <= tau < 1.0):
        raise ConfigError(f"tau must lie in [0, 1), got {tau}")
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 2:
        raise DimensionError(f"probabilities must be a 2-D matrix, got shape {p.shape}")
    if not np.all(np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0):
        raise InputError("probabilities must be finite and within [0, 1]")
    labels = (p > tau).astype(np.int8)
    if keep_observed_positive:
        if observed is None:
            raise ConfigError("keep_observed_positive requires the observed positive indices")
        obs = np.asarray(observed)
        if obs.ndim != 1 or obs.shape[0] != p.shape[0]:
            raise DimensionError(
                f"observed positives must be a vector of length {p.shape[0]}, got shape {obs.shape}"
            )
        if np.any(obs < 0) or np.any(obs >= p.shape[1]):
            raise LabelError(f"observed positive index out of range [0, {p.shape[1]})")
        labels[np.arange(p.shape[0]), obs.astype(np.int64)] = 1
    return labels


def avg_positives_per_example(labels) -> float:
    """Total count of 1-entries divided by the number of rows."""
    y = np.asarray(labels)
    if y.ndim != 2 or y.size == 0:
        raise InputError(f"labels must be a non-empty 2-D matrix, got shape {y.shape}")
    if not np.all((y == 0) | (y == 1)):
        raise LabelError("labels must be binary (0 or 1)")
    return float(y.sum()) / y.shape[0]
