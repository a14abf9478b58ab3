"""HTTP triage service over trained artifacts.

State is loaded once from a bundle directory and never mutated; every
response is a pure function of (state, request). Bodies are JSON.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import convnet, lssvm, symptomnet
from .corpus import SymptomVocabulary
from .errors import DataError, MissingFile

VOCAB_SCHEMA = "symptomlab/vocabulary/1"
PROFILES_SCHEMA = "symptomlab/profiles/1"
CLUSTERS_SCHEMA = "symptomlab/clusters/1"
MANIFEST_SCHEMA = "symptomlab/bundle/1"

CONCENTRATION_LIMIT = 0.99  # confidence above which suggestions stop
SIMILAR_THRESHOLD = 0.7


@dataclass(frozen=True)
class TriageState:
    vocabulary: SymptomVocabulary
    profiles: list[symptomnet.DiseaseProfile]
    similarity: np.ndarray
    cluster_assignments: dict[str, int]
    cluster_k: int
    models: dict[str, object]  # "lssvm" and/or "cnn"
    feature_mode: str

    @property
    def diseases(self) -> tuple[str, ...]:
        return tuple(p.disease for p in self.profiles)


def write_vocabulary(vocab: SymptomVocabulary, path) -> None:
    payload = {
        "schema": VOCAB_SCHEMA,
        "entries": list(vocab.entries),
        "severity": {n: vocab.severity[n] for n in vocab.entries},
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def read_vocabulary(path) -> SymptomVocabulary:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("schema") != VOCAB_SCHEMA:
        raise DataError(f"unexpected vocabulary schema in {path}")
    entries = tuple(payload["entries"])
    return SymptomVocabulary(
        entries=entries,
        index={n: i for i, n in enumerate(entries)},
        severity={n: int(payload["severity"][n]) for n in entries},
    )


def write_profiles(profiles, vocab_hash: str, path) -> None:
    payload = {
        "schema": PROFILES_SCHEMA,
        "vocab_hash": vocab_hash,
        "diseases": [p.disease for p in profiles],
        "incidence": [p.incidence.astype(int).tolist() for p in profiles],
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def read_profiles(path):
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("schema") != PROFILES_SCHEMA:
        raise DataError(f"unexpected profiles schema in {path}")
    profiles = [
        symptomnet.DiseaseProfile(
            disease=d, incidence=np.array(row, dtype=np.float64)
        )
        for d, row in zip(payload["diseases"], payload["incidence"])
    ]
    return profiles, payload["vocab_hash"]


def write_clusters(diseases, assignments, k, silhouette, vocab_hash, path) -> None:
    payload = {
        "schema": CLUSTERS_SCHEMA,
        "vocab_hash": vocab_hash,
        "k": int(k),
        "silhouette": float(silhouette),
        "diseases": list(diseases),
        "assignments": [int(a) for a in assignments],
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def read_clusters(path):
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("schema") != CLUSTERS_SCHEMA:
        raise DataError(f"unexpected clusters schema in {path}")
    return payload


def load_state(model_dir) -> TriageState:
    """Read a bundle directory; every artifact must share one vocabulary."""
    base = Path(model_dir)
    if not base.is_dir():
        raise MissingFile(f"model directory not found: {base}")
    vocab = read_vocabulary(base / "vocabulary.json")
    expected = vocab.content_hash()
    profiles, profiles_hash = read_profiles(base / "profiles.json")
    if profiles_hash != expected:
        raise DataError("profiles were built against a different vocabulary")
    clusters = read_clusters(base / "clusters.json")
    if clusters["vocab_hash"] != expected:
        raise DataError("clusters were built against a different vocabulary")
    models: dict[str, object] = {}
    if (base / "lssvm.json").is_file():
        model = lssvm.load_model(base / "lssvm.json")
        if model.vocab_hash != expected:
            raise DataError("lssvm model was trained against a different vocabulary")
        models["lssvm"] = model
    if (base / "cnn.json").is_file():
        model = convnet.load_model(base / "cnn.json")
        if model.vocab_hash != expected:
            raise DataError("cnn model was trained against a different vocabulary")
        models["cnn"] = model
    if not models:
        raise MissingFile(f"no lssvm.json or cnn.json model found in {base}")
    sim, _ = symptomnet.similarity_matrix(profiles)
    any_model = next(iter(models.values()))
    mode = "all" if len(any_model.feature_indices) == len(vocab) else "common_only"
    return TriageState(
        vocabulary=vocab,
        profiles=profiles,
        similarity=sim,
        cluster_assignments={
            d: a for d, a in zip(clusters["diseases"], clusters["assignments"])
        },
        cluster_k=clusters["k"],
        models=models,
        feature_mode=mode,
    )


class PredictRequest(BaseModel):
    symptoms: list[str]
    model: Literal["lssvm", "cnn"] = "lssvm"


class SuggestRequest(BaseModel):
    symptoms: list[str] = Field(default_factory=list)
    model: Literal["lssvm", "cnn"] = "lssvm"
    limit: int = 5


def encode_query(vocab: SymptomVocabulary, names: list[str]):
    """Binary query vector; unknown canonical names are returned, not dropped."""
    from .corpus import canonical_name

    vec = np.zeros(len(vocab), dtype=np.float64)
    unknown = []
    for raw in names:
        name = canonical_name(raw)
        j = vocab.index.get(name)
        if j is None:
            unknown.append(raw)
        else:
            vec[j] = 1.0
    return vec, unknown


def _model_probabilities(model, full_query: np.ndarray) -> np.ndarray:
    sub = full_query[..., model.feature_indices]
    if isinstance(model, lssvm.LsSvmModel):
        return lssvm.softmax(lssvm.decision_scores(model, sub))
    return convnet.forward(model, sub)


def _entropy(p: np.ndarray) -> float:
    safe = np.clip(p, 1e-300, 1.0)
    return float(-np.sum(safe * np.log(safe)))


def rank_suggestions(state: TriageState, model, asserted: np.ndarray, limit: int):
    """Expected-entropy-reduction ranking over unasserted symptoms.

    The chance a candidate is present is the confidence-weighted incidence
    over disease profiles; only toggling it on changes the encoding, so the
    expected reduction is that weight times the entropy drop it causes.
    """
    probs = _model_probabilities(model, asserted)
    if float(np.max(probs)) > CONCENTRATION_LIMIT:
        return []
    h0 = _entropy(probs)
    incidence = np.vstack([p.incidence for p in state.profiles])
    weights = probs @ incidence  # chance each symptom is present
    candidates = np.flatnonzero(asserted == 0.0)
    if candidates.size == 0:
        return []
    toggled = np.tile(asserted, (candidates.size, 1))
    toggled[np.arange(candidates.size), candidates] = 1.0
    toggled_probs = np.atleast_2d(_model_probabilities(model, toggled))
    ranked = []
    for row, j in enumerate(candidates):
        reduction = float(weights[j]) * (h0 - _entropy(toggled_probs[row]))
        if reduction > 1e-12:
            ranked.append((state.vocabulary.entries[int(j)], reduction))
    ranked.sort(key=lambda t: (-t[1], t[0]))
    return ranked[:limit]


def create_app(state: TriageState | None) -> FastAPI:
    app = FastAPI(title="symptomlab triage service")

    def require_state() -> TriageState:
        if state is None:
            raise HTTPException(status_code=503, detail="models not loaded")
        return state

    @app.get("/healthz")
    def healthz():
        if state is None or not state.models:
            raise HTTPException(status_code=503, detail="models not loaded")
        return {"status": "ok", "models": sorted(state.models)}

    @app.get("/api/v1/symptoms")
    def symptoms():
        s = require_state()
        return {"symptoms": list(s.vocabulary.entries)}

    @app.get("/api/v1/diseases")
    def diseases():
        s = require_state()
        return {"diseases": list(s.diseases)}

    @app.get("/api/v1/clusters")
    def clusters():
        s = require_state()
        return {
            "k": s.cluster_k,
            "memberships": [
                {"disease": d, "cluster": s.cluster_assignments[d]}
                for d in s.diseases
            ],
        }

    @app.get("/api/v1/similar/{disease}")
    def similar(disease: str):
        s = require_state()
        names = list(s.diseases)
        if disease not in names:
            raise HTTPException(status_code=404, detail=f"unknown disease {disease!r}")
        i = names.index(disease)
        rows = [
            {"disease": names[j], "similarity": float(s.similarity[i, j])}
            for j in range(len(names))
            if j != i
        ]
        rows.sort(key=lambda r: (-r["similarity"], r["disease"]))
        return {"disease": disease, "similar": rows}

    def resolve_model(s: TriageState, model_id: str):
        model = s.models.get(model_id)
        if model is None:
            raise HTTPException(
                status_code=503, detail=f"model {model_id!r} not loaded"
            )
        return model

    @app.post("/api/v1/predict")
    def predict(req: PredictRequest):
        s = require_state()
        if not req.symptoms:
            raise HTTPException(status_code=400, detail="symptom list is empty")
        vec, unknown = encode_query(s.vocabulary, req.symptoms)
        if unknown:
            raise HTTPException(
                status_code=422,
                detail={"unknown_symptoms": unknown},
            )
        model = resolve_model(s, req.model)
        probs = _model_probabilities(model, vec)
        order = sorted(range(len(probs)), key=lambda c: (-probs[c], c))
        ranking = [
            {"disease": s.diseases[c], "confidence": float(probs[c])} for c in order
        ]
        top = ranking[0]["disease"]
        similar_rows = [
            {"disease": d, "similarity": v}
            for d, v in symptomnet.similar_diseases(
                s.profiles, s.similarity, top, SIMILAR_THRESHOLD
            )
        ]
        return {
            "model": req.model,
            "feature_mode": s.feature_mode,
            "ranking": ranking,
            "similar": similar_rows,
        }

    @app.post("/api/v1/suggest")
    def suggest(req: SuggestRequest):
        s = require_state()
        vec, unknown = encode_query(s.vocabulary, req.symptoms)
        if unknown:
            raise HTTPException(
                status_code=422,
                detail={"unknown_symptoms": unknown},
            )
        model = resolve_model(s, req.model)
        ranked = rank_suggestions(s, model, vec, max(0, req.limit))
        return {
            "model": req.model,
            "suggestions": [
                {"symptom": name, "expected_entropy_reduction": value}
                for name, value in ranked
            ],
        }

    return app
