"""Training losses: full-supervision BCE, assume-negative, entropy-maximization.

Each loss returns its scalar value together with the gradient with respect
to the output logits, with the sigmoid folded in analytically. All losses
use mean reduction over every batch x label entry, so values are comparable
across label counts and duplicating examples leaves them unchanged.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DimensionError, InputError, LabelError

FULL_BCE = "full_bce"
AN = "an"
EM = "em"
LOSS_KINDS = (FULL_BCE, AN, EM)
SPML_LOSS_KINDS = (AN, EM)

DEFAULT_EM_ALPHA = 0.1


class LossOutput(NamedTuple):
    value: float
    dloss_dlogits: np.ndarray


def _check_probs(probs) -> np.ndarray:
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 2:
        raise DimensionError(f"probabilities must be a 2-D batch, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise InputError("probabilities contain non-finite values")
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise InputError("probabilities must lie strictly inside (0, 1); clamp upstream")
    return p


def _check_observed(observed, batch: int, n_labels: int) -> np.ndarray:
    obs = np.asarray(observed)
    if obs.ndim != 1 or obs.shape[0] != batch:
        raise DimensionError(
            f"observed positives must be a vector of length {batch}, got shape {obs.shape}"
        )
    if not np.issubdtype(obs.dtype, np.integer):
        raise LabelError(f"observed positives must be integers, got dtype {obs.dtype}")
    if np.any(obs < 0) or np.any(obs >= n_labels):
        raise LabelError(f"observed positive index out of range [0, {n_labels})")
    return obs.astype(np.int64)


def expand_single_positive(observed, n_labels: int) -> np.ndarray:
    """Binary matrix with a 1 at each observed index and 0 everywhere else."""
    obs = _check_observed(observed, np.asarray(observed).shape[0], n_labels)
    out = np.zeros((obs.shape[0], n_labels), dtype=np.int8)
    out[np.arange(obs.shape[0]), obs] = 1
    return out


def bce_full(probs, labels) -> LossOutput:
    """Binary cross-entropy averaged over all batch x label entries."""
    p = _check_probs(probs)
    y = np.asarray(labels)
    if y.shape != p.shape:
        raise DimensionError(f"labels shape {y.shape} does not match probabilities {p.shape}")
    if not np.all((y == 0) | (y == 1)):
        raise LabelError("labels must be binary (0 or 1)")
    y = y.astype(np.float64)
    n = p.size
    value = -(y * np.log(p) + (1.0 - y) * np.log1p(-p)).sum() / n
    return LossOutput(float(value), (p - y) / n)


def an_loss(probs, observed) -> LossOutput:
    """Assume-negative loss: BCE after treating every unobserved label as absent."""
    p = _check_probs(probs)
    return bce_full(p, expand_single_positive(observed, p.shape[1]))


def em_loss(probs, observed, alpha: float = DEFAULT_EM_ALPHA) -> LossOutput:
    """BCE on the observed positive plus entropy maximization elsewhere.

    Per entry the contribution is -log(p) at the observed positive and
    -alpha * H(p) at unobserved entries, where H is the binary entropy;
    the mean is taken over all batch x label entries. The entropy term is
    minimized at p = 0.5, so unobserved predictions are pulled toward 0.5.

    Args:
        probs: (B, L) predicted probabilities, strictly inside (0, 1).
        observed: length-B vector of observed positive indices.
        alpha: non-negative weight of the entropy term.
    """
    p = _check_probs(probs)
    batch, n_labels = p.shape
    obs = _check_observed(observed, batch, n_labels)
    if not (np.isfinite(alpha) and alpha >= 0.0):
        raise ConfigError(f"entropy weight alpha must be a finite non-negative real, got {alpha}")
    observed_mask = np.zeros(p.shape, dtype=bool)
    observed_mask[np.arange(batch), obs] = True
    n = p.size
    log_p = np.log(p)
    log_1mp = np.log1p(-p)
    entropy = -(p * log_p + (1.0 - p) * log_1mp)
    value = ((-log_p[observed_mask]).sum() - alpha * entropy[~observed_mask].sum()) / n
    dlogits = np.empty_like(p)
    dlogits[observed_mask] = (p[observed_mask] - 1.0) / n
    # d(-alpha * H(sigmoid(z)))/dz = -alpha * p(1-p) * log((1-p)/p)
    unobs = ~observed_mask
    dlogits[unobs] = -alpha * (p * (1.0 - p) * (log_1mp - log_p))[unobs] / n
    return LossOutput(float(value), dlogits)
