"""Minimal multi-label classifier: one hidden ReLU layer, sigmoid outputs.

All gradients are derived by hand and every operation is a deterministic
function of its inputs (plus an explicit seed), so repeated runs are
bitwise identical. The same architecture serves as teacher and student.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DimensionError, InputError, ParseError, TrainingError

# Probabilities emitted by `forward` are clamped to [PROB_EPS, 1 - PROB_EPS]
# so that no downstream loss ever evaluates log(0).
PROB_EPS = 1e-7

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

_CHECKPOINT_MAGIC = "spml-mlp v1"
_PARAM_FIELDS = ("w1", "b1", "w2", "b2")


@dataclass
class MlpModel:
    """Parameters of the classifier: features -> hidden (ReLU) -> labels (sigmoid).

    Shapes: w1 (D, H), b1 (H,), w2 (H, L), b2 (L,). All float64.
    """

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    @property
    def n_features(self) -> int:
        return self.w1.shape[0]

    @property
    def n_hidden(self) -> int:
        return self.w1.shape[1]

    @property
    def n_labels(self) -> int:
        return self.w2.shape[1]


@dataclass
class Gradients:
    """Loss gradients, one array per parameter, same shapes as the model."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray


@dataclass
class ForwardCache:
    """Activations retained by `forward_with_cache` for the backward pass."""

    x: np.ndarray
    z1: np.ndarray
    a1: np.ndarray


@dataclass
class AdamState:
    """First/second moment accumulators plus step counter and learning rate."""

    m: Gradients
    v: Gradients
    step: int
    learning_rate: float


def init_model(n_features: int, n_hidden: int, n_labels: int, seed: int = 0) -> MlpModel:
    """Glorot-uniform weights, zero biases, deterministic in `seed`."""
    for name, dim in (("n_features", n_features), ("n_hidden", n_hidden), ("n_labels", n_labels)):
        if int(dim) < 1:
            raise DimensionError(f"{name} must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    lim1 = np.sqrt(6.0 / (n_features + n_hidden))
    lim2 = np.sqrt(6.0 / (n_hidden + n_labels))
    return MlpModel(
        w1=rng.uniform(-lim1, lim1, size=(n_features, n_hidden)),
        b1=np.zeros(n_hidden),
        w2=rng.uniform(-lim2, lim2, size=(n_hidden, n_labels)),
        b2=np.zeros(n_labels),
    )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # Split by sign to avoid overflow in exp for large |z|.
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def forward_with_cache(model: MlpModel, x: np.ndarray) -> tuple[np.ndarray, ForwardCache]:
    """Forward pass returning clamped probabilities and cached activations."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.n_features:
        raise DimensionError(
            f"expected batch of shape (B, {model.n_features}), got {x.shape}"
        )
    if not np.all(np.isfinite(x)):
        raise InputError("forward input contains non-finite values")
    z1 = x @ model.w1 + model.b1
    a1 = np.maximum(z1, 0.0)
    z2 = a1 @ model.w2 + model.b2
    probs = np.clip(_sigmoid(z2), PROB_EPS, 1.0 - PROB_EPS)
    return probs, ForwardCache(x=x, z1=z1, a1=a1)


def forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Predicted probabilities for a batch, each entry in [PROB_EPS, 1 - PROB_EPS]."""
    return forward_with_cache(model, x)[0]


def backward(model: MlpModel, cache: ForwardCache, dloss_dlogits: np.ndarray) -> Gradients:
    """Parameter gradients given the loss gradient at the output logits.

    `cache` must come from `forward_with_cache` on the same batch. The ReLU
    subgradient at exactly zero pre-activation is defined as 0.
    """
    g = np.asarray(dloss_dlogits, dtype=np.float64)
    expected = (cache.x.shape[0], model.n_labels)
    if g.shape != expected:
        raise DimensionError(f"dloss_dlogits must have shape {expected}, got {g.shape}")
    dw2 = cache.a1.T @ g
    db2 = g.sum(axis=0)
    da1 = g @ model.w2.T
    dz1 = np.where(cache.z1 > 0.0, da1, 0.0)
    dw1 = cache.x.T @ dz1
    db1 = dz1.sum(axis=0)
    return Gradients(w1=dw1, b1=db1, w2=dw2, b2=db2)


def init_adam(model: MlpModel, learning_rate: float) -> AdamState:
    """Fresh optimizer state with zeroed moment accumulators."""
    if not (learning_rate > 0 and np.isfinite(learning_rate)):
        raise ConfigError(f"learning_rate must be a positive real, got {learning_rate}")
    zeros = lambda: Gradients(*(np.zeros_like(getattr(model, f)) for f in _PARAM_FIELDS))
    return AdamState(m=zeros(), v=zeros(), step=0, learning_rate=learning_rate)


def adam_step(model: MlpModel, grads: Gradients, state: AdamState) -> tuple[MlpModel, AdamState]:
    """One bias-corrected Adam update; returns a new model and new state."""
    t = state.step + 1
    new_params, new_m, new_v = {}, {}, {}
    for field in _PARAM_FIELDS:
        p = getattr(model, field)
        g = np.asarray(getattr(grads, field), dtype=np.float64)
        if g.shape != p.shape:
            raise DimensionError(f"gradient for {field} has shape {g.shape}, expected {p.shape}")
        if not np.all(np.isfinite(g)):
            raise TrainingError(f"non-finite gradient for parameter {field}")
        m = ADAM_BETA1 * getattr(state.m, field) + (1.0 - ADAM_BETA1) * g
        v = ADAM_BETA2 * getattr(state.v, field) + (1.0 - ADAM_BETA2) * g * g
        m_hat = m / (1.0 - ADAM_BETA1**t)
        v_hat = v / (1.0 - ADAM_BETA2**t)
        new_params[field] = p - state.learning_rate * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
        new_m[field] = m
        new_v[field] = v
    return (
        MlpModel(**new_params),
        AdamState(m=Gradients(**new_m), v=Gradients(**new_v), step=t,
                  learning_rate=state.learning_rate),
    )


def save_model(path, model: MlpModel) -> None:
    """Write a checkpoint: one ASCII header line, then raw little-endian float64.

    The write -> read round trip is bit-exact.
    """
    header = f"{_CHECKPOINT_MAGIC} D={model.n_features} H={model.n_hidden} L={model.n_labels}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        for field in _PARAM_FIELDS:
            arr = np.ascontiguousarray(getattr(model, field), dtype="<f8")
            fh.write(arr.tobytes())


_HEADER_RE = re.compile(r"^spml-mlp v1 D=(\d+) H=(\d+) L=(\d+)$")


def load_model(path) -> MlpModel:
    """Read a checkpoint written by `save_model`."""
    path = Path(path)
    with open(path, "rb") as fh:
        raw_header = fh.readline()
        payload = fh.read()
    try:
        header = raw_header.decode("ascii").rstrip("\n")
    except UnicodeDecodeError:
        raise ParseError("checkpoint header is not ASCII", path=path, line=1) from None
    match = _HEADER_RE.match(header)
    if match is None:
        raise ParseError(f"bad checkpoint header {header!r}", path=path, line=1)
    d, h, l = (int(g) for g in match.groups())
    if min(d, h, l) < 1:
        raise ParseError(f"checkpoint dimensions must be >= 1, got D={d} H={h} L={l}", path=path)
    shapes = {"w1": (d, h), "b1": (h,), "w2": (h, l), "b2": (l,)}
    expected_bytes = 8 * sum(int(np.prod(s)) for s in shapes.values())
    if len(payload) != expected_bytes:
        raise ParseError(
            f"checkpoint payload has {len(payload)} bytes, expected {expected_bytes}",
            path=path,
        )
    arrays = {}
    offset = 0
    for field, shape in shapes.items():
        count = int(np.prod(shape))
        arrays[field] = (
            np.frombuffer(payload, dtype="<f8", count=count, offset=offset)
            .reshape(shape)
            .astype(np.float64)
        )
        offset += 8 * count
    model = MlpModel(**arrays)
    for field in _PARAM_FIELDS:
        if not np.all(np.isfinite(getattr(model, field))):
            raise ParseError(f"checkpoint parameter {field} contains non-finite values", path=path)
    return model
