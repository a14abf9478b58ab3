"""Matplotlib renderings of the exported data series, written next to the
CSV files by the CLI report paths."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def occurrence_histogram(occ, path) -> None:
    """Bar chart: how many symptoms occur in exactly n diseases."""
    items = sorted(occ.histogram.items())
    xs = [k for k, _ in items]
    ys = [v for _, v in items]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.bar(xs, ys, color="#4878a8")
    ax.set_xlabel("number of diseases a symptom occurs in")
    ax.set_ylabel("symptoms")
    ax.set_title("Occurrence of symptoms over diseases")
    for x, y in zip(xs, ys):
        ax.text(x, y, str(y), ha="center", va="bottom", fontsize=7)
    _save(fig, path)


def common_unusual(report, path) -> None:
    """Stacked per-disease bars of common vs unusual symptom counts."""
    order = np.argsort(report.diseases)
    names = [report.diseases[i] for i in order]
    unusual = np.array([report.unusual_counts[i] for i in order])
    common = np.array([report.total_counts[i] for i in order]) - unusual
    xs = np.arange(len(names))
    fig, ax = plt.subplots(figsize=(max(8, 0.25 * len(names)), 5))
    ax.bar(xs, common, label="common", color="#4878a8")
    ax.bar(xs, unusual, bottom=common, label="unusual", color="#d1605e")
    ax.set_xticks(xs)
    ax.set_xticklabels(names, rotation=90, fontsize=6)
    ax.set_ylabel("symptoms in profile")
    ax.set_title("Common vs unusual symptoms per disease")
    ax.legend()
    _save(fig, path)


def pca_sweep(results, path) -> None:
    """Mean CV accuracy against the number of retained components."""
    ks = [k for k, _, _ in results]
    means = [acc for _, acc, _ in results]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(ks, means, marker="o", color="#4878a8")
    for k, acc, folds in results:
        ax.scatter([k] * len(folds), folds, s=8, color="#bbbbbb", zorder=1)
    ax.axhline(0.91, color="#d1605e", linestyle="--", linewidth=1, label="0.91")
    ax.set_xlabel("retained components")
    ax.set_ylabel("cross-validated accuracy")
    ax.set_title("Accuracy vs reduced feature count")
    ax.legend()
    _save(fig, path)


def silhouette_sweep(series_by_variant: dict, path) -> None:
    """Silhouette against k for one or more dataset variants."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, series in sorted(series_by_variant.items()):
        ks = [k for k, _, _ in series]
        scores = [s for _, s, _ in series]
        ax.plot(ks, scores, marker="o", label=label)
    ax.set_xlabel("clusters")
    ax.set_ylabel("silhouette score")
    ax.set_ylim(-1.0, 1.0)
    ax.set_title("Silhouette score of K-means clustering")
    ax.legend()
    _save(fig, path)


def loss_history(history, path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(range(len(history)), history, color="#4878a8")
    ax.set_xlabel("epoch")
    ax.set_ylabel("mean cross-entropy")
    ax.set_title("Training loss")
    _save(fig, path)


def confusion_heatmap(report, path) -> None:
    cm = report.confusion
    fig, ax = plt.subplots(figsize=(6.5, 5.5))
    im = ax.imshow(cm, cmap="Blues")
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    ax.set_title("Confusion matrix")
    if len(report.class_names) <= 25:
        ax.set_xticks(range(len(report.class_names)))
        ax.set_yticks(range(len(report.class_names)))
        ax.set_xticklabels(report.class_names, rotation=90, fontsize=6)
        ax.set_yticklabels(report.class_names, fontsize=6)
    fig.colorbar(im, ax=ax, shrink=0.8)
    _save(fig, path)
