"""PCA over the symptom design matrix and the reduced-feature CV sweep.

The covariance uses the 1/(n-1) normalization; eigenpairs come from the
symmetric Jacobi solver, so components inherit its deterministic sign
convention. In the cross-validation sweep the basis is fit on each
training fold only; validation rows never touch the fit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lssvm, numkit
from .corpus import DesignMatrix, kfold
from .errors import DimensionMismatch, KOutOfRange


@dataclass(frozen=True)
class PcaBasis:
    mean: np.ndarray  # column means, length d
    components: np.ndarray  # (d, k) top-k eigenvectors
    explained_variance: np.ndarray  # k eigenvalues, descending


def fit_pca(m: DesignMatrix, k: int) -> PcaBasis:
    """Top-k principal axes of the column-centered feature matrix."""
    x = m.features
    n, d = x.shape
    if not 1 <= k <= d:
        raise KOutOfRange(f"k must be in [1, {d}], got {k}")
    if n < 2:
        raise KOutOfRange("need at least 2 rows to estimate a covariance")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = (centered.T @ centered) / (n - 1)
    cov = 0.5 * (cov + cov.T)
    decomp = numkit.eig_sym(cov)
    return PcaBasis(
        mean=mean,
        components=np.ascontiguousarray(decomp.vectors[:, :k]),
        explained_variance=decomp.values[:k].copy(),
    )


def project(basis: PcaBasis, m: DesignMatrix) -> DesignMatrix:
    """Map rows to (x - mean) @ components; labels ride along unchanged."""
    if m.features.shape[1] != basis.mean.shape[0]:
        raise DimensionMismatch(
            f"matrix has {m.features.shape[1]} columns, basis expects {basis.mean.shape[0]}"
        )
    projected = (m.features - basis.mean) @ basis.components
    return DesignMatrix(
        features=np.ascontiguousarray(projected),
        labels=m.labels,
        vocabulary=m.vocabulary,
        encoding="pca",
        class_names=m.class_names,
    )


def component_sweep(m: DesignMatrix, k_values, folds: int, seed: int):
    """Mean k-fold LS-SVM accuracy for each component count.

    Returns a list of (k, mean_accuracy, per_fold_accuracies). One full
    eigendecomposition per fold is reused across all k (top-k columns of a
    larger basis are the k-component basis).
    """
    d = m.features.shape[1]
    ks = sorted(set(int(k) for k in k_values))
    if not ks or ks[0] < 1 or ks[-1] > d:
        raise KOutOfRange(f"component counts must lie in [1, {d}]")
    partitions = kfold(m, folds, seed)
    per_fold: dict[int, list[float]] = {k: [] for k in ks}
    for train_idx, val_idx in partitions:
        train = m.take(train_idx)
        val = m.take(val_idx)
        basis = fit_pca(train, ks[-1])
        for k in ks:
            sub = PcaBasis(
                mean=basis.mean,
                components=basis.components[:, :k],
                explained_variance=basis.explained_variance[:k],
            )
            train_k = project(sub, train)
            val_k = project(sub, val)
            model = lssvm.train(train_k, lssvm.default_params(k))
            preds = lssvm.predict_labels(model, val_k.features)
            per_fold[k].append(float(np.mean(preds == val.labels)))
    return [(k, float(np.mean(per_fold[k])), tuple(per_fold[k])) for k in ks]


def select_component_count(sweep_results, threshold: float = 0.91) -> int:
    """Smallest component count whose mean CV accuracy clears the threshold;
    falls back to the best-scoring k if none does."""
    qualifying = [k for k, acc, _ in sweep_results if acc > threshold]
    if qualifying:
        return min(qualifying)
    return max(sweep_results, key=lambda row: (row[1], -row[0]))[0]
