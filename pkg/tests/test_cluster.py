from itertools import combinations

import numpy as np
import pytest

from symptomlab import cluster as cl
from symptomlab.errors import KOutOfRange, SingleCluster, ZeroRow


def antipodal_groups(per_group=5, seed=0):
    rng = np.random.RandomState(seed)
    v = np.array([1.0, 0.5, -0.2, 0.8])
    rows = []
    for _ in range(per_group):
        rows.append(v + 0.05 * rng.randn(4))
    for _ in range(per_group):
        rows.append(-v + 0.05 * rng.randn(4))
    return np.vstack(rows)


def brute_force_best_2partition(x):
    """Exhaustive minimum of the spherical objective over all 2-partitions."""
    unit = x / np.linalg.norm(x, axis=1)[:, None]
    n = unit.shape[0]
    best, best_parts = None, None
    indices = list(range(n))
    for size in range(1, n // 2 + 1):
        for left in combinations(indices, size):
            left = set(left)
            right = set(indices) - left
            total = 0.0
            for part in (left, right):
                rows = unit[sorted(part)]
                mean = rows.mean(axis=0)
                norm = np.linalg.norm(mean)
                centroid = mean / norm if norm > 0 else mean
                diff = rows - centroid
                total += float(np.sum(diff * diff))
            if best is None or total < best:
                best, best_parts = total, frozenset(
                    (frozenset(left), frozenset(right))
                )
    return best, best_parts


class TestKmeans:
    def test_recovers_antipodal_groups_vs_bruteforce(self):
        x = antipodal_groups()
        result = cl.kmeans_cosine(x, k=2, seed=3, restarts=5)
        best_obj, best_parts = brute_force_best_2partition(x)
        got = frozenset(
            frozenset(np.flatnonzero(result.assignments == c).tolist())
            for c in (0, 1)
        )
        assert got == best_parts
        assert result.objective == pytest.approx(best_obj, abs=1e-10)

    def test_k_equals_n_zero_objective(self):
        rng = np.random.RandomState(1)
        x = rng.randn(6, 3)
        result = cl.kmeans_cosine(x, k=6, seed=0, restarts=3)
        assert result.objective == pytest.approx(0.0, abs=1e-12)
        assert sorted(result.assignments.tolist()) == list(range(6))

    def test_objective_trace_monotone(self):
        rng = np.random.RandomState(2)
        x = rng.randn(40, 5)
        result = cl.kmeans_cosine(x, k=4, seed=0, restarts=3)
        trace = result.objective_trace
        for earlier, later in zip(trace, trace[1:]):
            assert later <= earlier + 1e-9

    def test_every_cluster_nonempty(self):
        rng = np.random.RandomState(3)
        x = rng.randn(30, 4)
        result = cl.kmeans_cosine(x, k=7, seed=1, restarts=4)
        assert set(result.assignments.tolist()) == set(range(7))

    def test_row_scaling_invariance(self):
        x = antipodal_groups(seed=5)
        scaled = x.copy()
        scaled[3] *= 17.0
        scaled[7] *= 0.01
        a = cl.kmeans_cosine(x, k=2, seed=2, restarts=4)
        b = cl.kmeans_cosine(scaled, k=2, seed=2, restarts=4)
        assert np.array_equal(a.assignments, b.assignments)

    def test_duplicates_co_assigned(self):
        x = antipodal_groups(seed=6)
        x[1] = x[0]
        x[6] = x[5]
        result = cl.kmeans_cosine(x, k=2, seed=0, restarts=4)
        assert result.assignments[0] == result.assignments[1]
        assert result.assignments[5] == result.assignments[6]

    def test_deterministic(self):
        rng = np.random.RandomState(8)
        x = rng.randn(25, 6)
        a = cl.kmeans_cosine(x, k=3, seed=11, restarts=6)
        b = cl.kmeans_cosine(x, k=3, seed=11, restarts=6)
        assert np.array_equal(a.assignments, b.assignments)
        assert a.objective == b.objective
        assert a.restart_index == b.restart_index

    def test_zero_row_rejected(self):
        x = np.ones((4, 3))
        x[2] = 0.0
        with pytest.raises(ZeroRow):
            cl.kmeans_cosine(x, k=2, seed=0)

    def test_k_out_of_range(self):
        x = np.ones((4, 3)) + np.eye(4, 3)
        with pytest.raises(KOutOfRange):
            cl.kmeans_cosine(x, k=1, seed=0)
        with pytest.raises(KOutOfRange):
            cl.kmeans_cosine(x, k=5, seed=0)


def silhouette_oracle(x, labels):
    """Direct per-point formula, independent of the matrix implementation."""
    unit = x / np.linalg.norm(x, axis=1)[:, None]
    n = len(labels)
    scores = []
    for i in range(n):
        same = [j for j in range(n) if labels[j] == labels[i] and j != i]
        if not same:
            scores.append(0.0)
            continue
        a = np.mean([1.0 - float(unit[i] @ unit[j]) for j in same])
        bs = []
        for c in set(labels) - {labels[i]}:
            rows = [j for j in range(n) if labels[j] == c]
            bs.append(np.mean([1.0 - float(unit[i] @ unit[j]) for j in rows]))
        b = min(bs)
        denom = max(a, b)
        scores.append(0.0 if denom == 0 else (b - a) / denom)
    return float(np.mean(scores))


class TestSilhouette:
    def test_separated_tight_groups_score_high(self):
        x = antipodal_groups(seed=9)
        labels = np.array([0] * 5 + [1] * 5)
        assert cl.silhouette(x, labels) > 0.9

    def test_identical_directions_forced_split(self):
        x = np.tile(np.array([1.0, 2.0, 0.5]), (8, 1))
        labels = np.array([0, 0, 0, 0, 1, 1, 1, 1])
        assert cl.silhouette(x, labels) <= 0.0

    def test_matches_direct_formula(self):
        rng = np.random.RandomState(4)
        x = rng.randn(12, 4)
        labels = rng.randint(0, 3, size=12)
        labels[:3] = [0, 1, 2]
        assert cl.silhouette(x, labels) == pytest.approx(
            silhouette_oracle(x, labels), abs=1e-12
        )

    def test_bounded(self):
        for seed in range(5):
            rng = np.random.RandomState(seed)
            x = rng.randn(15, 3)
            labels = rng.randint(0, 4, size=15)
            labels[:4] = [0, 1, 2, 3]
            s = cl.silhouette(x, labels)
            assert -1.0 <= s <= 1.0

    def test_singleton_contributes_zero(self):
        x = antipodal_groups(seed=2)
        labels = np.array([0] * 5 + [1] * 4 + [2])
        direct = silhouette_oracle(x, labels)
        assert cl.silhouette(x, labels) == pytest.approx(direct, abs=1e-12)

    def test_single_cluster_rejected(self):
        x = antipodal_groups()
        with pytest.raises(SingleCluster):
            cl.silhouette(x, np.zeros(10, dtype=int))


class TestKSweep:
    def test_series_shape_and_bounds(self):
        rng = np.random.RandomState(7)
        x = rng.randn(30, 5)
        series = cl.k_sweep(x, range(2, 6), seed=0, restarts=3)
        assert [k for k, _, _ in series] == [2, 3, 4, 5]
        for _, s, obj in series:
            assert -1.0 <= s <= 1.0
            assert obj >= 0.0
