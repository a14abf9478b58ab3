"""Experiment orchestration: dataset preparation, single runs, ablations,
and cross-validation, all deterministic functions of their config."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import convnet, lssvm, symptomnet
from .corpus import (
    Corpus,
    DesignMatrix,
    SymptomVocabulary,
    build_vocabulary,
    encode,
    kfold,
    load_dataset,
    stratified_split,
    synth_generate,
)
from .errors import InvalidConfig
from .metrics import EvalReport, build_report, confusion


@dataclass(frozen=True)
class SynthSpec:
    diseases: int = 41
    records: int = 120
    pool_min: int = 5
    pool_max: int = 18
    unusual_fraction: float = 0.39
    seed: int = 0


@dataclass(frozen=True)
class ExperimentConfig:
    data_path: str | None = None
    severity_path: str | None = None
    synth: SynthSpec | None = None
    model: str = "lssvm"  # lssvm | cnn
    features: str = "all"  # all | common_only
    encoding: str = "binary"  # binary | severity
    test_fraction: float = 0.2
    seed: int = 0
    sigma: float | None = None  # None -> sqrt(active features)/2
    gamma: float = 10.0
    cnn_epochs: int = 30
    cnn_learning_rate: float = 0.05
    cnn_batch_size: int = 32

    def __post_init__(self):
        if self.model not in ("lssvm", "cnn"):
            raise InvalidConfig(f"unknown model {self.model!r}")
        if self.features not in ("all", "common_only"):
            raise InvalidConfig(f"unknown feature mode {self.features!r}")
        if self.data_path is None and self.synth is None:
            raise InvalidConfig("either data_path or a synth spec is required")


@dataclass(frozen=True)
class Prepared:
    """Corpus plus everything derived from it that experiments share."""

    corpus: Corpus
    vocabulary: SymptomVocabulary
    matrix: DesignMatrix
    profiles: list
    occurrence: symptomnet.OccurrenceTable
    source: str


def prepare(cfg: ExperimentConfig) -> Prepared:
    if cfg.data_path is not None:
        corpus = load_dataset(cfg.data_path)
        source = str(cfg.data_path)
    else:
        s = cfg.synth
        corpus = synth_generate(
            s.diseases, s.records, (s.pool_min, s.pool_max),
            s.unusual_fraction, s.seed,
        )
        source = f"synthetic(diseases={s.diseases},records={s.records},seed={s.seed})"
    vocab = build_vocabulary(corpus, cfg.severity_path)
    matrix = encode(corpus, vocab, cfg.encoding)
    profiles = symptomnet.disease_profiles(corpus, vocab)
    occ = symptomnet.occurrence_histogram(profiles)
    return Prepared(
        corpus=corpus,
        vocabulary=vocab,
        matrix=matrix,
        profiles=profiles,
        occurrence=occ,
        source=source,
    )


def train_model(cfg: ExperimentConfig, train: DesignMatrix, subset: np.ndarray):
    if cfg.model == "lssvm":
        sigma = cfg.sigma if cfg.sigma is not None else math.sqrt(len(subset)) / 2.0
        params = lssvm.KernelParams(sigma=sigma, gamma=cfg.gamma)
        return lssvm.train(train, params, feature_indices=subset)
    cnn_cfg = convnet.CnnConfig(
        input_length=len(subset),
        class_count=len(train.class_names),
        learning_rate=cfg.cnn_learning_rate,
        epochs=cfg.cnn_epochs,
        batch_size=cfg.cnn_batch_size,
        seed=cfg.seed,
    )
    model, history = convnet.train(convnet.init(cnn_cfg), train)
    model = replace(
        model,
        feature_indices=np.asarray(subset, dtype=np.int64),
        vocab_hash=train.vocabulary.content_hash(),
        class_names=train.class_names,
    )
    return model, history


def _predict_batch(model, features: np.ndarray) -> np.ndarray:
    if isinstance(model, lssvm.LsSvmModel):
        return lssvm.predict_labels(model, features)
    return convnet.predict_labels(model, features)


def _probabilities(model, features: np.ndarray) -> np.ndarray:
    if isinstance(model, lssvm.LsSvmModel):
        return lssvm.softmax(lssvm.decision_scores(model, features))
    return convnet.forward(model, features)


@dataclass(frozen=True)
class ExperimentResult:
    report: EvalReport
    model: object
    loss_history: list[float] | None
    test_probabilities: np.ndarray
    test_labels: np.ndarray
    feature_indices: np.ndarray
    prepared: Prepared


def run_experiment_full(cfg: ExperimentConfig, prepared: Prepared | None = None) -> ExperimentResult:
    """80/20 stratified split, train, evaluate; returns model and extras."""
    prep = prepared if prepared is not None else prepare(cfg)
    subset = symptomnet.feature_subset(prep.vocabulary, prep.occurrence, cfg.features)
    sub = prep.matrix.with_columns(subset)
    train, test = stratified_split(sub, cfg.test_fraction, cfg.seed)
    trained = train_model(cfg, train, subset)
    history = None
    if cfg.model == "cnn":
        trained, history = trained
    preds = _predict_batch(trained, test.features)
    cm = confusion(test.labels, preds, len(sub.class_names))
    descriptor = {
        "model": cfg.model,
        "features": cfg.features,
        "encoding": cfg.encoding,
        "test_fraction": cfg.test_fraction,
        "seed": cfg.seed,
        "source": prep.source,
    }
    report = build_report(descriptor, cm, sub.class_names)
    return ExperimentResult(
        report=report,
        model=trained,
        loss_history=history,
        test_probabilities=_probabilities(trained, test.features),
        test_labels=test.labels,
        feature_indices=subset,
        prepared=prep,
    )


def run_experiment(cfg: ExperimentConfig) -> EvalReport:
    return run_experiment_full(cfg).report


ABLATION_ORDER = (
    ("lssvm", "common_only"),
    ("lssvm", "all"),
    ("cnn", "common_only"),
    ("cnn", "all"),
)


def ablate(cfg: ExperimentConfig, prepared: Prepared | None = None):
    """The four model/feature-mode rows, sharing one prepared corpus."""
    prep = prepared if prepared is not None else prepare(cfg)
    reports = []
    for model, features in ABLATION_ORDER:
        run_cfg = replace(cfg, model=model, features=features)
        reports.append(run_experiment_full(run_cfg, prep).report)
    return reports


def cross_validate(cfg: ExperimentConfig, k: int, prepared: Prepared | None = None):
    """Stratified k-fold metrics for the configured model and feature mode.

    Returns a list of per-fold dicts with accuracy and macro F1.
    """
    prep = prepared if prepared is not None else prepare(cfg)
    subset = symptomnet.feature_subset(prep.vocabulary, prep.occurrence, cfg.features)
    sub = prep.matrix.with_columns(subset)
    rows = []
    for fold, (train_idx, val_idx) in enumerate(kfold(sub, k, cfg.seed)):
        train, val = sub.take(train_idx), sub.take(val_idx)
        trained = train_model(cfg, train, subset)
        if cfg.model == "cnn":
            trained, _ = trained
        preds = _predict_batch(trained, val.features)
        cm = confusion(val.labels, preds, len(sub.class_names))
        report = build_report({"fold": fold}, cm, sub.class_names)
        rows.append(
            {
                "fold": fold,
                "accuracy": report.accuracy,
                "macro_f1": report.macro_f1,
            }
        )
    return rows
