"""Spherical K-means with cosine distance, silhouette scoring, and k-sweeps.

Rows are normalized to unit length; on the sphere the squared-error
objective and cosine-similarity assignment order coincide, so Lloyd
iterations monotonically lower the intra-cluster variance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import KOutOfRange, SingleCluster, ZeroRow

MAX_ITERATIONS = 300


@dataclass(frozen=True)
class Clustering:
    k: int
    assignments: np.ndarray  # cluster id per row
    centroids: np.ndarray  # (k, d) unit rows
    objective: float  # total intra-cluster squared distance
    silhouette: float
    objective_trace: tuple[float, ...]  # per-iteration objective, winning run
    restart_index: int


def _unit_rows(m: np.ndarray) -> np.ndarray:
    x = np.asarray(m, dtype=np.float64)
    norms = np.linalg.norm(x, axis=1)
    if np.any(norms == 0.0):
        raise ZeroRow(f"row {int(np.flatnonzero(norms == 0.0)[0])} is all zero")
    return x / norms[:, None]


def _objective(unit: np.ndarray, centroids: np.ndarray, assignments: np.ndarray) -> float:
    diffs = unit - centroids[assignments]
    return float(np.einsum("ij,ij->", diffs, diffs))


def _farthest_point_seeds(unit: np.ndarray, k: int, start: int) -> np.ndarray:
    """Greedy seeding: start row, then repeatedly the row least similar to
    its closest chosen seed (ties to the lowest row index)."""
    chosen = [start]
    best_sim = unit @ unit[start]
    for _ in range(1, k):
        nxt = int(np.argmin(best_sim))
        chosen.append(nxt)
        np.minimum(best_sim, unit @ unit[nxt], out=best_sim)
    return unit[chosen].copy()


def _lloyd(unit: np.ndarray, k: int, centroids: np.ndarray):
    n = unit.shape[0]
    assignments = np.full(n, -1, dtype=np.int64)
    trace = []
    for _ in range(MAX_ITERATIONS):
        sim = unit @ centroids.T
        new_assign = np.argmax(sim, axis=1)
        # re-seed empty clusters with the row farthest from its own centroid
        for c in range(k):
            if not np.any(new_assign == c):
                own = sim[np.arange(n), new_assign]
                candidates = np.flatnonzero(
                    np.bincount(new_assign, minlength=k)[new_assign] > 1
                )
                worst = candidates[np.argmin(own[candidates])]
                new_assign[worst] = c
                centroids[c] = unit[worst]
                sim = unit @ centroids.T
        trace.append(_objective(unit, centroids, new_assign))
        if np.array_equal(new_assign, assignments):
            break
        assignments = new_assign
        for c in range(k):
            members = unit[assignments == c]
            mean = members.mean(axis=0)
            norm = np.linalg.norm(mean)
            if norm > 1e-12:
                centroids[c] = mean / norm
    return assignments, centroids, trace


def kmeans_cosine(m, k: int, seed: int = 0, restarts: int = 10) -> Clustering:
    """Best-of-restarts spherical K-means.

    Each restart draws a start row from the seed stream and grows centroids
    by farthest-point seeding. The winner has the lowest objective, ties
    broken by restart index.
    """
    unit = _unit_rows(m)
    n = unit.shape[0]
    if not 2 <= k <= n:
        raise KOutOfRange(f"k must be in [2, {n}], got {k}")
    if restarts < 1:
        raise KOutOfRange("need at least one restart")
    rng = np.random.RandomState(seed)
    starts = rng.randint(0, n, size=restarts)
    best = None
    for r in range(restarts):
        centroids = _farthest_point_seeds(unit, k, int(starts[r]))
        assignments, centroids, trace = _lloyd(unit, k, centroids)
        objective = trace[-1]
        if best is None or objective < best[0]:
            best = (objective, r, assignments, centroids, trace)
    objective, r, assignments, centroids, trace = best
    score = silhouette(unit, assignments) if k >= 2 else 0.0
    return Clustering(
        k=k,
        assignments=assignments,
        centroids=centroids,
        objective=objective,
        silhouette=score,
        objective_trace=tuple(trace),
        restart_index=r,
    )


def silhouette(m, assignments) -> float:
    """Mean over points of (b - a) / max(a, b) under cosine distance.

    a: mean distance to the point's own cluster (excluding itself);
    b: smallest mean distance to any other cluster. Singletons score 0.
    """
    unit = _unit_rows(m)
    labels = np.asarray(assignments, dtype=np.int64)
    ids = np.unique(labels)
    if ids.size < 2:
        raise SingleCluster("silhouette needs at least two clusters")
    n = unit.shape[0]
    dist = 1.0 - unit @ unit.T
    np.maximum(dist, 0.0, out=dist)
    members = {int(c): np.flatnonzero(labels == c) for c in ids}
    sums = np.column_stack([dist[:, members[int(c)]].sum(axis=1) for c in ids])
    counts = np.array([members[int(c)].size for c in ids], dtype=np.float64)
    col_of = {int(c): j for j, c in enumerate(ids)}
    scores = np.zeros(n)
    for i in range(n):
        own = col_of[int(labels[i])]
        size_own = counts[own]
        if size_own <= 1:
            continue  # singleton contributes 0
        a = sums[i, own] / (size_own - 1.0)
        other = [sums[i, j] / counts[j] for j in range(ids.size) if j != own]
        b = min(other)
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0.0 else (b - a) / denom
    return float(np.mean(scores))


def k_sweep(m, k_range, seed: int = 0, restarts: int = 10):
    """Silhouette and objective across cluster counts: list of
    (k, silhouette, objective)."""
    results = []
    for k in k_range:
        c = kmeans_cosine(m, int(k), seed=seed, restarts=restarts)
        results.append((int(k), c.silhouette, c.objective))
    return results
