"""Five-stage 1D convolutional classifier with from-scratch backprop.

Layer order: conv (stride 1, no padding) -> ReLU -> position-wise dense
channel mixing -> ReLU -> max-pool over positions -> flatten -> affine ->
softmax. The dense layer shares its weights across positions, which keeps
the published layer sequence shape-coherent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .corpus import DesignMatrix
from .errors import DimensionMismatch, InvalidConfig, LabelOutOfRange, NonFiniteLoss

MODEL_SCHEMA = "symptomlab/cnn/1"


@dataclass(frozen=True)
class CnnConfig:
    input_length: int
    class_count: int
    conv_filters: int = 64
    kernel_width: int = 2
    dense_units: int = 16
    pool_width: int = 2
    learning_rate: float = 0.05
    epochs: int = 30
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        counts = (
            self.input_length,
            self.class_count,
            self.conv_filters,
            self.kernel_width,
            self.dense_units,
            self.pool_width,
            self.epochs,
            self.batch_size,
        )
        if any(c <= 0 for c in counts) or self.learning_rate <= 0.0:
            raise InvalidConfig("all sizes and the learning rate must be positive")
        if self.kernel_width > self.input_length:
            raise InvalidConfig("kernel_width cannot exceed input_length")
        if self.class_count < 2:
            raise InvalidConfig("need at least two classes")
        if self.pooled_positions < 1:
            raise InvalidConfig("pool_width leaves no pooled positions")

    @property
    def conv_positions(self) -> int:
        return self.input_length - self.kernel_width + 1

    @property
    def pooled_positions(self) -> int:
        return self.conv_positions // self.pool_width

    @property
    def flat_size(self) -> int:
        return self.pooled_positions * self.dense_units


@dataclass(frozen=True)
class CnnModel:
    config: CnnConfig
    conv_w: np.ndarray  # (filters, kernel_width)
    conv_b: np.ndarray  # (filters,)
    dense_w: np.ndarray  # (filters, dense_units)
    dense_b: np.ndarray  # (dense_units,)
    out_w: np.ndarray  # (flat_size, class_count)
    out_b: np.ndarray  # (class_count,)
    feature_indices: np.ndarray | None = None
    vocab_hash: str = ""
    class_names: tuple[str, ...] = ()


def _glorot(rng, fan_in, fan_out, shape):
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def init(config: CnnConfig) -> CnnModel:
    """Glorot-uniform weights, zero biases, all draws from the config seed."""
    rng = np.random.RandomState(config.seed)
    conv_w = _glorot(rng, config.kernel_width, config.conv_filters,
                     (config.conv_filters, config.kernel_width))
    dense_w = _glorot(rng, config.conv_filters, config.dense_units,
                      (config.conv_filters, config.dense_units))
    out_w = _glorot(rng, config.flat_size, config.class_count,
                    (config.flat_size, config.class_count))
    return CnnModel(
        config=config,
        conv_w=conv_w,
        conv_b=np.zeros(config.conv_filters),
        dense_w=dense_w,
        dense_b=np.zeros(config.dense_units),
        out_w=out_w,
        out_b=np.zeros(config.class_count),
    )


def _windows(x: np.ndarray, kernel_width: int) -> np.ndarray:
    # (batch, positions, kernel_width) sliding views stacked into one array
    b, d = x.shape
    p = d - kernel_width + 1
    return np.stack([x[:, i:i + p] for i in range(kernel_width)], axis=2)


def _forward_parts(model: CnnModel, x: np.ndarray):
    cfg = model.config
    if x.shape[1] != cfg.input_length:
        raise DimensionMismatch(
            f"expected input length {cfg.input_length}, got {x.shape[1]}"
        )
    win = _windows(x, cfg.kernel_width)
    pre1 = win @ model.conv_w.T + model.conv_b
    h1 = np.maximum(pre1, 0.0)
    pre2 = h1 @ model.dense_w + model.dense_b
    h2 = np.maximum(pre2, 0.0)
    q, pw = cfg.pooled_positions, cfg.pool_width
    blocks = h2[:, : q * pw].reshape(x.shape[0], q, pw, cfg.dense_units)
    arg = np.argmax(blocks, axis=2)
    pooled = np.take_along_axis(blocks, arg[:, :, None, :], axis=2)[:, :, 0, :]
    flat = pooled.reshape(x.shape[0], cfg.flat_size)
    logits = flat @ model.out_w + model.out_b
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    probs = e / e.sum(axis=1, keepdims=True)
    return win, pre1, h1, pre2, arg, flat, probs


def forward(model: CnnModel, x) -> np.ndarray:
    """Class probability vector(s); rows sum to 1."""
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    probs = _forward_parts(model, np.atleast_2d(arr))[-1]
    return probs[0] if single else probs


def _gradients(model: CnnModel, x: np.ndarray, labels: np.ndarray):
    """Mean cross-entropy loss and gradients for a batch."""
    cfg = model.config
    b = x.shape[0]
    win, pre1, h1, pre2, arg, flat, probs = _forward_parts(model, x)
    eps = np.finfo(np.float64).tiny
    loss = float(-np.mean(np.log(probs[np.arange(b), labels] + eps)))

    dlogits = probs.copy()
    dlogits[np.arange(b), labels] -= 1.0
    dlogits /= b
    g_out_w = flat.T @ dlogits
    g_out_b = dlogits.sum(axis=0)

    q, pw = cfg.pooled_positions, cfg.pool_width
    dpool = (dlogits @ model.out_w.T).reshape(b, q, cfg.dense_units)
    dblocks = np.zeros((b, q, pw, cfg.dense_units))
    np.put_along_axis(dblocks, arg[:, :, None, :], dpool[:, :, None, :], axis=2)
    dh2 = np.zeros_like(pre2)
    dh2[:, : q * pw] = dblocks.reshape(b, q * pw, cfg.dense_units)

    dpre2 = dh2 * (pre2 > 0.0)
    g_dense_w = np.einsum("bpf,bpu->fu", h1, dpre2)
    g_dense_b = dpre2.sum(axis=(0, 1))

    dpre1 = (dpre2 @ model.dense_w.T) * (pre1 > 0.0)
    g_conv_w = np.einsum("bpk,bpf->fk", win, dpre1)
    g_conv_b = dpre1.sum(axis=(0, 1))

    grads = {
        "conv_w": g_conv_w,
        "conv_b": g_conv_b,
        "dense_w": g_dense_w,
        "dense_b": g_dense_b,
        "out_w": g_out_w,
        "out_b": g_out_b,
    }
    return loss, grads


def train(model: CnnModel, data: DesignMatrix, config: CnnConfig | None = None):
    """Mini-batch gradient descent on mean cross-entropy.

    Shuffling is a pure function of the config seed, so training twice with
    the same inputs produces bit-identical weights. Returns the trained
    model and the per-epoch mean loss history.
    """
    cfg = config or model.config
    x = np.ascontiguousarray(data.features, dtype=np.float64)
    labels = np.asarray(data.labels, dtype=np.int64)
    if labels.min(initial=0) < 0 or labels.max(initial=0) >= cfg.class_count:
        raise LabelOutOfRange(
            f"labels must lie in [0, {cfg.class_count}); got max {labels.max()}"
        )
    params = {
        "conv_w": model.conv_w.copy(),
        "conv_b": model.conv_b.copy(),
        "dense_w": model.dense_w.copy(),
        "dense_b": model.dense_b.copy(),
        "out_w": model.out_w.copy(),
        "out_b": model.out_b.copy(),
    }
    rng = np.random.RandomState(cfg.seed + 1)
    n = x.shape[0]
    history = []
    current = replace(model, **params)
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, cfg.batch_size):
            rows = order[start:start + cfg.batch_size]
            loss, grads = _gradients(current, x[rows], labels[rows])
            if not math.isfinite(loss):
                raise NonFiniteLoss(
                    f"training diverged (loss {loss}); try a lower learning rate"
                )
            # params alias current's arrays, so in-place updates are visible
            for name, g in grads.items():
                params[name] -= cfg.learning_rate * g
            epoch_losses.append(loss)
        history.append(float(np.mean(epoch_losses)))
    return current, history


def predict_labels(model: CnnModel, x: np.ndarray, chunk: int = 512) -> np.ndarray:
    """Batch argmax labels (argmax takes the lowest class id on ties)."""
    arr = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty(arr.shape[0], dtype=np.int64)
    for start in range(0, arr.shape[0], chunk):
        probs = forward(model, arr[start:start + chunk])
        out[start:start + chunk] = np.argmax(probs, axis=1)
    return out


def predict(model: CnnModel, x):
    """Argmax class plus the full (name, probability) ranking."""
    probs = forward(model, np.asarray(x, dtype=np.float64))
    names = model.class_names or tuple(
        f"class_{c}" for c in range(model.config.class_count)
    )
    order = sorted(range(len(probs)), key=lambda c: (-probs[c], c))
    return int(np.argmax(probs)), [(names[c], float(probs[c])) for c in order]


def grad_check(model: CnnModel, sample, h: float = 1e-5) -> float:
    """Max guarded relative error between analytic and central-difference
    gradients over every parameter, for one (x, label) sample.

    Only meant for small models (input_length <= 20).
    """
    if model.config.input_length > 20:
        raise InvalidConfig("grad_check is restricted to input_length <= 20")
    x, label = sample
    xb = np.atleast_2d(np.asarray(x, dtype=np.float64))
    yb = np.array([label], dtype=np.int64)
    _, grads = _gradients(model, xb, yb)
    arrays = {
        "conv_w": model.conv_w.copy(),
        "conv_b": model.conv_b.copy(),
        "dense_w": model.dense_w.copy(),
        "dense_b": model.dense_b.copy(),
        "out_w": model.out_w.copy(),
        "out_b": model.out_b.copy(),
    }

    def loss_with(arrays_now):
        loss, _ = _gradients(replace(model, **arrays_now), xb, yb)
        return loss

    worst = 0.0
    for name, arr in arrays.items():
        flat = arr.ravel()
        g = grads[name].ravel()
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + h
            up = loss_with(arrays)
            flat[i] = keep - h
            down = loss_with(arrays)
            flat[i] = keep
            numeric = (up - down) / (2.0 * h)
            denom = max(abs(g[i]) + abs(numeric), 1.0)
            worst = max(worst, abs(g[i] - numeric) / denom)
    return worst


def save_model(model: CnnModel, path) -> None:
    cfg = model.config
    payload = {
        "schema": MODEL_SCHEMA,
        "config": {
            "input_length": cfg.input_length,
            "class_count": cfg.class_count,
            "conv_filters": cfg.conv_filters,
            "kernel_width": cfg.kernel_width,
            "dense_units": cfg.dense_units,
            "pool_width": cfg.pool_width,
            "learning_rate": cfg.learning_rate,
            "epochs": cfg.epochs,
            "batch_size": cfg.batch_size,
            "seed": cfg.seed,
        },
        "class_names": list(model.class_names),
        "feature_indices": (
            model.feature_indices.tolist() if model.feature_indices is not None else None
        ),
        "vocab_hash": model.vocab_hash,
        "conv_w": model.conv_w.tolist(),
        "conv_b": model.conv_b.tolist(),
        "dense_w": model.dense_w.tolist(),
        "dense_b": model.dense_b.tolist(),
        "out_w": model.out_w.tolist(),
        "out_b": model.out_b.tolist(),
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_model(path) -> CnnModel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("schema") != MODEL_SCHEMA:
        raise ValueError(f"unexpected model schema {payload.get('schema')!r}")
    cfg = CnnConfig(**payload["config"])
    fi = payload.get("feature_indices")
    return CnnModel(
        config=cfg,
        conv_w=np.array(payload["conv_w"], dtype=np.float64),
        conv_b=np.array(payload["conv_b"], dtype=np.float64),
        dense_w=np.array(payload["dense_w"], dtype=np.float64),
        dense_b=np.array(payload["dense_b"], dtype=np.float64),
        out_w=np.array(payload["out_w"], dtype=np.float64),
        out_b=np.array(payload["out_b"], dtype=np.float64),
        feature_indices=np.array(fi, dtype=np.int64) if fi is not None else None,
        vocab_hash=payload["vocab_hash"],
        class_names=tuple(payload["class_names"]),
    )
