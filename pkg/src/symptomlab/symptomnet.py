"""Disease-symptom bipartite network statistics.

A disease profile is the union of its records' symptom sets as a binary
incidence vector. Symptoms occurring in exactly one profile are "unusual",
in two or more "common"; the split drives the feature ablations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, SymptomVocabulary
from .errors import EmptySubset, ZeroVector


@dataclass(frozen=True)
class DiseaseProfile:
    disease: str
    incidence: np.ndarray  # binary, length = vocabulary size


@dataclass(frozen=True)
class OccurrenceTable:
    counts: np.ndarray  # per-symptom disease-occurrence count
    histogram: dict[int, int]  # occurrence count -> number of symptoms

    @property
    def unusual_mask(self) -> np.ndarray:
        return self.counts == 1

    @property
    def common_mask(self) -> np.ndarray:
        return self.counts >= 2


@dataclass(frozen=True)
class UniquenessReport:
    diseases: tuple[str, ...]
    unusual_counts: tuple[int, ...]
    total_counts: tuple[int, ...]
    rates: tuple[float, ...]
    average_rate: float | None  # excludes zero-unusual diseases; None if all zero


def disease_profiles(corpus: Corpus, vocab: SymptomVocabulary) -> list[DiseaseProfile]:
    """One binary incidence vector per disease, in sorted disease order."""
    union: dict[str, set[int]] = {d: set() for d in corpus.diseases}
    for record in corpus.records:
        owned = union[record.disease]
        for s in record.symptoms:
            owned.add(vocab.index[s])
    profiles = []
    for disease in corpus.diseases:
        vec = np.zeros(len(vocab), dtype=np.float64)
        vec[sorted(union[disease])] = 1.0
        profiles.append(DiseaseProfile(disease=disease, incidence=vec))
    return profiles


def occurrence_histogram(profiles: list[DiseaseProfile]) -> OccurrenceTable:
    """Counts of how many diseases exhibit each symptom, plus the histogram."""
    if not profiles:
        raise ZeroVector("need at least one profile")
    stacked = np.vstack([p.incidence for p in profiles])
    counts = stacked.sum(axis=0).astype(np.int64)
    histogram: dict[int, int] = {}
    for c in counts:
        if c > 0:
            histogram[int(c)] = histogram.get(int(c), 0) + 1
    return OccurrenceTable(counts=counts, histogram=dict(sorted(histogram.items())))


def uniqueness_report(
    profiles: list[DiseaseProfile], occ: OccurrenceTable
) -> UniquenessReport:
    """Per-disease unusual-symptom share; the average skips zero-unusual diseases."""
    unusual = occ.unusual_mask
    names, n_unusual, n_total, rates = [], [], [], []
    for p in profiles:
        owned = p.incidence > 0
        total = int(owned.sum())
        uniq = int((owned & unusual).sum())
        names.append(p.disease)
        n_unusual.append(uniq)
        n_total.append(total)
        rates.append(uniq / total if total else 0.0)
    nonzero = [r for u, r in zip(n_unusual, rates) if u > 0]
    return UniquenessReport(
        diseases=tuple(names),
        unusual_counts=tuple(n_unusual),
        total_counts=tuple(n_total),
        rates=tuple(rates),
        average_rate=float(np.mean(nonzero)) if nonzero else None,
    )


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Dot product over the product of Euclidean norms."""
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity of a zero vector is undefined")
    return float(np.dot(a, b) / (na * nb))


def similarity_matrix(profiles: list[DiseaseProfile]):
    """Pairwise cosine similarity of profiles.

    Returns (matrix, disjoint_pairs) where disjoint_pairs counts unordered
    pairs with similarity exactly 0 (no shared symptoms).
    """
    if len(profiles) < 2:
        raise ZeroVector("need at least two profiles")
    stacked = np.vstack([p.incidence for p in profiles])
    norms = np.linalg.norm(stacked, axis=1)
    if np.any(norms == 0.0):
        raise ZeroVector("a disease profile has no symptoms")
    overlap = stacked @ stacked.T  # integer-valued shared-symptom counts
    sim = overlap / np.outer(norms, norms)
    np.fill_diagonal(sim, 1.0)
    upper = np.triu_indices(len(profiles), k=1)
    disjoint = int(np.count_nonzero(overlap[upper] == 0.0))
    return sim, disjoint


def similar_diseases(
    profiles: list[DiseaseProfile],
    sim: np.ndarray,
    disease: str,
    threshold: float = 0.7,
):
    """Other diseases whose profile similarity meets the threshold, ranked."""
    names = [p.disease for p in profiles]
    i = names.index(disease)
    pairs = [
        (names[j], float(sim[i, j]))
        for j in range(len(names))
        if j != i and sim[i, j] >= threshold
    ]
    pairs.sort(key=lambda t: (-t[1], t[0]))
    return pairs


def feature_subset(
    vocab: SymptomVocabulary, occ: OccurrenceTable, mode: str = "all"
) -> np.ndarray:
    """Column indices for a feature mode: every symptom, or common-only."""
    if mode == "all":
        return np.arange(len(vocab), dtype=np.int64)
    if mode == "common_only":
        idx = np.flatnonzero(occ.common_mask).astype(np.int64)
        if idx.size == 0:
            raise EmptySubset("no symptom occurs in two or more diseases")
        return idx
    raise ValueError(f"unknown feature mode {mode!r}")
