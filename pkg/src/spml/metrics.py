"""Ranking metrics: per-class average precision and its mean over classes.

AP here is "precision at each positive, averaged" with no interpolation.
Ties are broken deterministically by ascending original index, so every
evaluation is reproducible and has a simple brute-force oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, EvaluationError, InputError, LabelError


@dataclass
class EvalReport:
    """MAP over classes with at least one positive; undefined classes are NaN."""

    map: float
    per_class_ap: np.ndarray
    n_classes_evaluated: int


def average_precision(scores, labels) -> float:
    """AP of one class; NaN when the class has no positive example.

    Examples are ranked by descending score, ties broken by ascending
    original index; AP is the mean over positives of the precision at
    each positive's rank.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.ndim != 1 or y.ndim != 1 or s.shape != y.shape:
        raise DimensionError(
            f"scores and labels must be equal-length vectors, got {s.shape} and {y.shape}"
        )
    if not np.all(np.isfinite(s)):
        raise InputError("scores contain non-finite values")
    if not np.all((y == 0) | (y == 1)):
        raise LabelError("labels must be binary (0 or 1)")
    n_pos = int(y.sum())
    if n_pos == 0:
        return math.nan
    order = np.lexsort((np.arange(s.shape[0]), -s))
    hits = y[order] == 1
    cum_pos = np.cumsum(hits)
    ranks = np.flatnonzero(hits) + 1
    return float((cum_pos[hits] / ranks).mean())


def mean_average_precision(scores, labels) -> EvalReport:
    """Column-wise AP; MAP is the mean over classes with >= 1 positive."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.ndim != 2 or s.shape != y.shape:
        raise DimensionError(
            f"scores and labels must be matching 2-D matrices, got {s.shape} and {y.shape}"
        )
    per_class = np.array(
        [average_precision(s[:, j], y[:, j]) for j in range(s.shape[1])], dtype=np.float64
    )
    defined = ~np.isnan(per_class)
    if not defined.any():
        raise EvaluationError("every class has zero positives; MAP is undefined")
    return EvalReport(
        map=float(per_class[defined].mean()),
        per_class_ap=per_class,
        n_classes_evaluated=int(defined.sum()),
    )
