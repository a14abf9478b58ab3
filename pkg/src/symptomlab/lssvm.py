"""One-vs-rest least-squares SVM with an RBF kernel.

Training a class solves the saddle system
    [[0, 1^T], [1, K + I/gamma]] [b; alpha] = [0; y]
with y in {+1,-1}. The coefficient matrix is shared by every class, so one
Cholesky factorization of K + I/gamma serves all 41 right-hand sides via
block elimination.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import numkit
from .corpus import DesignMatrix
from .errors import DimensionMismatch, NotPositiveDefinite, SingularSystem

MODEL_SCHEMA = "symptomlab/lssvm/1"
KKT_TOL = 1e-8


@dataclass(frozen=True)
class KernelParams:
    sigma: float
    gamma: float

    def __post_init__(self):
        if not (self.sigma > 0.0 and self.gamma > 0.0):
            raise ValueError("sigma and gamma must be positive")


def default_params(active_features: int) -> KernelParams:
    """Bandwidth at median-heuristic scale for binary vectors, mild ridge."""
    return KernelParams(sigma=math.sqrt(active_features) / 2.0, gamma=10.0)


@dataclass(frozen=True)
class LsSvmModel:
    support_points: np.ndarray  # training features, one row per sample
    alpha: np.ndarray  # (classes, samples)
    bias: np.ndarray  # (classes,)
    params: KernelParams
    class_names: tuple[str, ...]
    feature_indices: np.ndarray  # columns of the full vocabulary used
    vocab_hash: str
    kkt_residual: float

    @property
    def class_count(self) -> int:
        return len(self.class_names)


def rbf_kernel(x, z, sigma: float) -> float:
    """exp(-||x-z||^2 / (2 sigma^2)) for a single pair of vectors."""
    xv = np.asarray(x, dtype=np.float64)
    zv = np.asarray(z, dtype=np.float64)
    if xv.shape != zv.shape:
        raise DimensionMismatch(f"vector shapes differ: {xv.shape} vs {zv.shape}")
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    diff = xv - zv
    return float(np.exp(-float(diff @ diff) / (2.0 * sigma * sigma)))


def kernel_matrix(a: np.ndarray, b: np.ndarray, sigma: float) -> np.ndarray:
    """Pairwise RBF kernel via the squared-distance expansion."""
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(
            f"feature counts differ: {a.shape[1]} vs {b.shape[1]}"
        )
    sq_a = np.einsum("ij,ij->i", a, a)
    sq_b = np.einsum("ij,ij->i", b, b)
    d2 = sq_a[:, None] + sq_b[None, :] - 2.0 * (a @ b.T)
    np.maximum(d2, 0.0, out=d2)
    return np.exp(-d2 / (2.0 * sigma * sigma))


def _kkt_solve(factor, ones_sol, rhs0: float, rhs1: np.ndarray):
    """Block elimination for [[0,1^T],[1,H]] [b; alpha] = [rhs0; rhs1]."""
    nu = numkit.solve_cholesky(factor, rhs1)
    denom = float(np.sum(ones_sol))
    if denom == 0.0 or not math.isfinite(denom):
        raise SingularSystem("degenerate kernel matrix; try a larger gamma")
    b = (float(np.sum(nu)) - rhs0) / denom
    return b, nu - b * ones_sol


def train(
    data: DesignMatrix,
    params: KernelParams,
    feature_indices=None,
) -> LsSvmModel:
    """Fit one-vs-rest LS-SVM coefficients for every class in `data`.

    The KKT residual is verified against the full saddle system; one step
    of iterative refinement is applied if round-off leaves it above 1e-8.
    """
    x = np.ascontiguousarray(data.features, dtype=np.float64)
    labels = data.labels
    classes = len(data.class_names)
    if classes < 2:
        raise SingularSystem("need at least two classes to train")
    n = x.shape[0]
    if feature_indices is None:
        feature_indices = np.arange(x.shape[1], dtype=np.int64)
    feature_indices = np.asarray(feature_indices, dtype=np.int64)

    k = kernel_matrix(x, x, params.sigma)
    k = 0.5 * (k + k.T)
    h = k + np.eye(n) / params.gamma
    try:
        factor = numkit.cholesky(h)
    except NotPositiveDefinite as exc:
        raise SingularSystem(
            f"kernel system not positive definite ({exc}); try a larger gamma"
        ) from exc
    ones = np.ones(n)
    ones_sol = numkit.solve_cholesky(factor, ones)

    targets = np.where(labels[None, :] == np.arange(classes)[:, None], 1.0, -1.0)
    alpha = np.empty((classes, n))
    bias = np.empty(classes)
    worst = 0.0
    for c in range(classes):
        y = targets[c]
        b, a = _kkt_solve(factor, ones_sol, 0.0, y)
        # residual of the full system: [sum(alpha); H alpha + b 1 - y]
        r0 = -float(np.sum(a))
        r1 = y - (h @ a + b)
        res = max(abs(r0), float(np.max(np.abs(r1))))
        if res > KKT_TOL:
            db, da = _kkt_solve(factor, ones_sol, r0, r1)
            b += db
            a += da
            r0 = -float(np.sum(a))
            r1 = y - (h @ a + b)
            res = max(abs(r0), float(np.max(np.abs(r1))))
        if res > KKT_TOL:
            raise SingularSystem(
                f"KKT residual {res:.2e} exceeds {KKT_TOL:g} for class {c}; "
                "try a larger gamma"
            )
        alpha[c] = a
        bias[c] = b
        worst = max(worst, res)
    return LsSvmModel(
        support_points=x,
        alpha=alpha,
        bias=bias,
        params=params,
        class_names=data.class_names,
        feature_indices=feature_indices,
        vocab_hash=data.vocabulary.content_hash(),
        kkt_residual=worst,
    )


def decision_scores(model: LsSvmModel, x) -> np.ndarray:
    """Per-class scores sum_i alpha_ci K(x_i, x) + b_c."""
    xv = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if xv.shape[1] != model.support_points.shape[1]:
        raise DimensionMismatch(
            f"expected {model.support_points.shape[1]} features, got {xv.shape[1]}"
        )
    k = kernel_matrix(xv, model.support_points, model.params.sigma)
    scores = k @ model.alpha.T + model.bias
    return scores[0] if np.asarray(x).ndim == 1 else scores


def softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - np.max(scores, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=-1, keepdims=True)


def predict(model: LsSvmModel, x):
    """Argmax class plus the full ranking with softmax confidences.

    Ties go to the lowest class id; the ranked list is sorted by
    (-confidence, class id).
    """
    scores = decision_scores(model, x)
    if scores.ndim == 1:
        conf = softmax(scores)
        winner = int(np.argmax(scores))
        order = sorted(range(len(conf)), key=lambda c: (-conf[c], c))
        ranked = [(model.class_names[c], float(conf[c])) for c in order]
        return winner, ranked
    raise DimensionMismatch("predict expects a single feature vector")


def predict_labels(model: LsSvmModel, x: np.ndarray) -> np.ndarray:
    """Batch argmax labels (ties to the lowest class id)."""
    scores = decision_scores(model, x)
    return np.argmax(scores, axis=1).astype(np.int64)


def save_model(model: LsSvmModel, path) -> None:
    payload = {
        "schema": MODEL_SCHEMA,
        "sigma": model.params.sigma,
        "gamma": model.params.gamma,
        "class_names": list(model.class_names),
        "feature_indices": model.feature_indices.tolist(),
        "vocab_hash": model.vocab_hash,
        "kkt_residual": model.kkt_residual,
        "support_points": model.support_points.tolist(),
        "alpha": model.alpha.tolist(),
        "bias": model.bias.tolist(),
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_model(path) -> LsSvmModel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("schema") != MODEL_SCHEMA:
        raise ValueError(f"unexpected model schema {payload.get('schema')!r}")
    return LsSvmModel(
        support_points=np.array(payload["support_points"], dtype=np.float64),
        alpha=np.array(payload["alpha"], dtype=np.float64),
        bias=np.array(payload["bias"], dtype=np.float64),
        params=KernelParams(sigma=payload["sigma"], gamma=payload["gamma"]),
        class_names=tuple(payload["class_names"]),
        feature_indices=np.array(payload["feature_indices"], dtype=np.int64),
        vocab_hash=payload["vocab_hash"],
        kkt_residual=payload["kkt_residual"],
    )
