"""Dataset ingestion, vocabulary building, encoding, splits, and synthesis.

The on-disk format is a wide CSV with a header row: first column the disease
name, remaining columns symptom slots (any count, blanks allowed). An
optional severity CSV maps `Symptom,weight` with integer grades.
"""

from __future__ import annotations

import csv
import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    ClassTooSmall,
    DuplicateSeverityEntry,
    EmptyRecord,
    FractionOutOfRange,
    InfeasibleSpec,
    KOutOfRange,
    MalformedRow,
    MissingFile,
    OutOfVocabularySymptom,
)

log = logging.getLogger(__name__)


def canonical_name(raw: str) -> str:
    """Trim, lowercase, and join inner whitespace with underscores."""
    return "_".join(raw.strip().lower().split())


@dataclass(frozen=True)
class Record:
    disease: str
    symptoms: frozenset[str]


@dataclass(frozen=True)
class Corpus:
    records: tuple[Record, ...]
    diseases: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class SymptomVocabulary:
    entries: tuple[str, ...]
    index: dict[str, int]
    severity: dict[str, int]
    unknown_severity_names: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    def content_hash(self) -> str:
        """Stable hash binding trained artifacts to one vocabulary."""
        payload = "\n".join(f"{name}:{self.severity[name]}" for name in self.entries)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class DesignMatrix:
    features: np.ndarray
    labels: np.ndarray
    vocabulary: SymptomVocabulary
    encoding: str
    class_names: tuple[str, ...]

    @property
    def n_rows(self) -> int:
        return int(self.features.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    def with_columns(self, indices) -> "DesignMatrix":
        """Column-subset view used by the feature ablations."""
        idx = np.asarray(indices, dtype=np.int64)
        return DesignMatrix(
            features=np.ascontiguousarray(self.features[:, idx]),
            labels=self.labels,
            vocabulary=self.vocabulary,
            encoding=self.encoding,
            class_names=self.class_names,
        )

    def take(self, rows) -> "DesignMatrix":
        idx = np.asarray(rows, dtype=np.int64)
        return DesignMatrix(
            features=np.ascontiguousarray(self.features[idx]),
            labels=self.labels[idx],
            vocabulary=self.vocabulary,
            encoding=self.encoding,
            class_names=self.class_names,
        )


def _build_corpus(rows: list[tuple[str, frozenset[str]]]) -> Corpus:
    records = tuple(Record(disease=d, symptoms=s) for d, s in rows)
    diseases = tuple(sorted({r.disease for r in records}))
    return Corpus(records=records, diseases=diseases)


def load_dataset(path, severity_path=None) -> Corpus:
    """Load the wide disease/symptom CSV into a Corpus.

    Cells are canonicalized, empty cells dropped, duplicates within a row
    collapsed. Record order follows file order. `severity_path` is accepted
    here for symmetry but only consumed by build_vocabulary.
    """
    p = Path(path)
    if not p.is_file():
        raise MissingFile(f"dataset file not found: {p}")
    rows: list[tuple[str, frozenset[str]]] = []
    with p.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, cells in enumerate(reader, start=1):
            if lineno == 1:
                continue  # header row required by the format
            if not cells or all(not c.strip() for c in cells):
                continue
            disease = canonical_name(cells[0])
            if not disease:
                raise MalformedRow(f"line {lineno}: empty disease name")
            symptoms = frozenset(
                canonical_name(c) for c in cells[1:] if canonical_name(c)
            )
            if not symptoms:
                raise EmptyRecord(f"line {lineno}: record has no symptoms")
            rows.append((disease, symptoms))
    if not rows:
        raise MalformedRow(f"{p}: no data rows after the header")
    return _build_corpus(rows)


def load_severity(path) -> dict[str, int]:
    """Read the `Symptom,weight` CSV; grades must be positive integers."""
    p = Path(path)
    if not p.is_file():
        raise MissingFile(f"severity file not found: {p}")
    grades: dict[str, int] = {}
    with p.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, cells in enumerate(reader, start=1):
            if lineno == 1:
                continue
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) < 2:
                raise MalformedRow(f"severity line {lineno}: expected name,weight")
            name = canonical_name(cells[0])
            try:
                grade = int(cells[1].strip())
            except ValueError as exc:
                raise MalformedRow(
                    f"severity line {lineno}: weight {cells[1]!r} is not an integer"
                ) from exc
            if grade <= 0:
                raise MalformedRow(f"severity line {lineno}: grade must be positive")
            if name in grades:
                raise DuplicateSeverityEntry(f"severity line {lineno}: duplicate {name!r}")
            grades[name] = grade
    return grades


def build_vocabulary(corpus: Corpus, severity_path=None) -> SymptomVocabulary:
    """Lexicographically ordered vocabulary over all corpus symptoms.

    Severity defaults to grade 1; entries in the severity file that never
    occur in the corpus are recorded and logged, not fatal.
    """
    if not corpus.records:
        raise MalformedRow("cannot build a vocabulary from an empty corpus")
    names = sorted({s for r in corpus.records for s in r.symptoms})
    grades = load_severity(severity_path) if severity_path else {}
    known = set(names)
    unknown = tuple(sorted(n for n in grades if n not in known))
    for name in unknown:
        log.warning("severity entry %r does not occur in the corpus", name)
    severity = {n: grades.get(n, 1) for n in names}
    return SymptomVocabulary(
        entries=tuple(names),
        index={n: i for i, n in enumerate(names)},
        severity=severity,
        unknown_severity_names=unknown,
    )


def encode(corpus: Corpus, vocab: SymptomVocabulary, mode: str = "binary") -> DesignMatrix:
    """Bag-of-words design matrix: one row per record, one column per symptom."""
    if mode not in ("binary", "severity"):
        raise ValueError(f"unknown encoding mode {mode!r}")
    n, d = len(corpus.records), len(vocab)
    features = np.zeros((n, d), dtype=np.float64)
    label_of = {name: i for i, name in enumerate(corpus.diseases)}
    labels = np.zeros(n, dtype=np.int64)
    for i, record in enumerate(corpus.records):
        labels[i] = label_of[record.disease]
        for s in record.symptoms:
            j = vocab.index.get(s)
            if j is None:
                raise OutOfVocabularySymptom(f"record {i}: symptom {s!r} not in vocabulary")
            features[i, j] = float(vocab.severity[s]) if mode == "severity" else 1.0
    return DesignMatrix(
        features=features,
        labels=labels,
        vocabulary=vocab,
        encoding=mode,
        class_names=corpus.diseases,
    )


def _class_indices(labels: np.ndarray) -> dict[int, np.ndarray]:
    return {int(c): np.flatnonzero(labels == c) for c in np.unique(labels)}


def stratified_split(m: DesignMatrix, test_fraction: float, seed: int):
    """Per-class shuffled 1-test_fraction/test_fraction split, seeded."""
    if not 0.0 < test_fraction < 1.0:
        raise FractionOutOfRange(f"test_fraction must be in (0,1), got {test_fraction}")
    rng = np.random.RandomState(seed)
    train_rows, test_rows = [], []
    for c, idx in sorted(_class_indices(m.labels).items()):
        if idx.size < 2:
            raise ClassTooSmall(f"class {c} has {idx.size} row(s); need at least 2")
        perm = idx[rng.permutation(idx.size)]
        n_test = int(round(test_fraction * idx.size))
        n_test = min(max(n_test, 1), idx.size - 1)
        test_rows.append(perm[:n_test])
        train_rows.append(perm[n_test:])
    train = np.sort(np.concatenate(train_rows))
    test = np.sort(np.concatenate(test_rows))
    return m.take(train), m.take(test)


def kfold(m: DesignMatrix, k: int, seed: int):
    """Stratified k-fold index partitions: list of (train_idx, val_idx)."""
    by_class = sorted(_class_indices(m.labels).items())
    smallest = min(idx.size for _, idx in by_class)
    if k < 2 or k > smallest:
        raise KOutOfRange(f"k must be in [2, {smallest}], got {k}")
    rng = np.random.RandomState(seed)
    fold_members: list[list[np.ndarray]] = [[] for _ in range(k)]
    for _, idx in by_class:
        perm = idx[rng.permutation(idx.size)]
        for f in range(k):
            fold_members[f].append(perm[f::k])
    folds = [np.sort(np.concatenate(parts)) for parts in fold_members]
    everything = np.arange(m.n_rows)
    result = []
    for f in range(k):
        val = folds[f]
        train = np.setdiff1d(everything, val, assume_unique=False)
        result.append((train, val))
    return result


def synth_generate(
    num_diseases: int,
    records_per_disease: int = 120,
    symptoms_per_disease: tuple[int, int] = (5, 18),
    unusual_fraction: float = 0.39,
    seed: int = 0,
) -> Corpus:
    """Generate a corpus whose per-disease symptom pools match the requested
    uniqueness fraction: round(unusual_fraction * pool) symptoms are private
    to the disease, the rest drawn from a shared universe reused by >= 2
    diseases. Each record samples a non-empty subset of its disease's pool,
    and every pool symptom is forced into at least one record so disease
    profiles equal pools exactly.
    """
    lo, hi = symptoms_per_disease
    if num_diseases <= 0 or records_per_disease <= 0 or lo <= 0 or hi < lo:
        raise InfeasibleSpec("synthetic corpus parameters must be positive with lo <= hi")
    if not 0.0 <= unusual_fraction <= 1.0:
        raise InfeasibleSpec(f"unusual_fraction must be in [0,1], got {unusual_fraction}")
    rng = np.random.RandomState(seed)
    pool_sizes = rng.randint(lo, hi + 1, size=num_diseases)
    n_unique = np.array([int(round(unusual_fraction * p)) for p in pool_sizes])
    n_shared = pool_sizes - n_unique
    if np.any(n_shared > 0) and num_diseases < 2:
        raise InfeasibleSpec(
            "shared symptoms require at least 2 diseases; "
            "raise unusual_fraction to 1.0 or add diseases"
        )
    # Shared universe sized for ~3 diseases per shared symptom.
    total_shared = int(n_shared.sum())
    universe = max(int(n_shared.max(initial=0)), max(1, round(total_shared / 3)))
    shared_names = [f"shared_{j:03d}" for j in range(universe)]

    diseases = [f"disease_{i:02d}" for i in range(num_diseases)]
    pools: list[list[str]] = []
    usage: dict[str, list[int]] = {s: [] for s in shared_names}
    for i in range(num_diseases):
        unique = [f"{diseases[i]}_only_{j:02d}" for j in range(n_unique[i])]
        picked = []
        if n_shared[i] > 0:
            chosen = rng.choice(universe, size=n_shared[i], replace=False)
            picked = [shared_names[j] for j in sorted(chosen)]
            for s in picked:
                usage[s].append(i)
        pools.append(unique + picked)
    # Any shared symptom used by exactly one disease would read as unusual;
    # give it a second home.
    for s in shared_names:
        if len(usage[s]) == 1:
            owner = usage[s][0]
            others = [i for i in range(num_diseases) if i != owner and s not in pools[i]]
            if not others:
                raise InfeasibleSpec(f"cannot place shared symptom {s} in a second disease")
            extra = others[rng.randint(len(others))]
            pools[extra].append(s)
            usage[s].append(extra)

    rows: list[tuple[str, frozenset[str]]] = []
    for i, disease in enumerate(diseases):
        pool = pools[i]
        per_record: list[set[str]] = []
        for _ in range(records_per_disease):
            mask = rng.rand(len(pool)) < 0.5
            chosen = {pool[j] for j in np.flatnonzero(mask)}
            if not chosen:
                chosen = {pool[rng.randint(len(pool))]}
            per_record.append(chosen)
        for j, s in enumerate(pool):  # coverage: profile == pool
            per_record[j % records_per_disease].add(s)
        rows.extend((disease, frozenset(r)) for r in per_record)
    return _build_corpus(rows)


def save_corpus(corpus: Corpus, path) -> None:
    """Write the wide CSV form; round-trips through load_dataset."""
    width = max(len(r.symptoms) for r in corpus.records)
    p = Path(path)
    with p.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Disease"] + [f"Symptom_{i + 1}" for i in range(width)])
        for r in corpus.records:
            symptoms = sorted(r.symptoms)
            writer.writerow([r.disease] + symptoms + [""] * (width - len(symptoms)))


def corpus_summary(corpus: Corpus) -> dict:
    """Counts used by the `ingest` subcommand."""
    per_record = [len(r.symptoms) for r in corpus.records]
    vocab = {s for r in corpus.records for s in r.symptoms}
    per_disease: dict[str, int] = {}
    for r in corpus.records:
        per_disease[r.disease] = per_disease.get(r.disease, 0) + 1
    return {
        "records": len(corpus.records),
        "diseases": len(corpus.diseases),
        "symptoms": len(vocab),
        "max_symptoms_per_record": max(per_record),
        "min_symptoms_per_record": min(per_record),
        "records_per_disease": per_disease,
    }
