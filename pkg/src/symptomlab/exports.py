"""Delimited and JSON export of reports, tables, and plot-ready series.

Field ordering is fixed and floats use repr, so exporting the same object
twice produces byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import IoFailure
from .metrics import EvalReport, per_disease_f1


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _open_writer(path):
    try:
        fh = Path(path).open("w", newline="", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return fh, csv.writer(fh, lineterminator="\n")


def write_rows(path, header, rows) -> None:
    """Generic delimited table with a header row."""
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def report_to_dict(report: EvalReport) -> dict:
    return {
        "descriptor": report.descriptor,
        "macro": {
            "precision": report.macro_precision,
            "recall": report.macro_recall,
            "f1": report.macro_f1,
            "accuracy": report.accuracy,
        },
        "per_class": [
            {
                "name": m.name,
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
            }
            for m in report.per_class
        ],
        "confusion": report.confusion.tolist(),
    }


def write_report(report: EvalReport, path, format: str = "csv") -> None:
    """One experiment's evaluation: macro block then per-class rows."""
    if format == "json":
        try:
            Path(path).write_text(
                json.dumps(report_to_dict(report), indent=2) + "\n", encoding="utf-8"
            )
        except OSError as exc:
            raise IoFailure(f"cannot write {path}: {exc}") from exc
        return
    if format != "csv":
        raise ValueError(f"unknown format {format!r}")
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(["section", "name", "precision", "recall", "f1", "support"])
        for key in sorted(report.descriptor):
            writer.writerow(["descriptor", key, _fmt(report.descriptor[key]), "", "", ""])
        writer.writerow(
            [
                "macro",
                "macro",
                _fmt(report.macro_precision),
                _fmt(report.macro_recall),
                _fmt(report.macro_f1),
                _fmt(int(report.confusion.sum())),
            ]
        )
        writer.writerow(["accuracy", "accuracy", _fmt(report.accuracy), "", "", ""])
        for m in report.per_class:
            writer.writerow(
                ["class", m.name, _fmt(m.precision), _fmt(m.recall), _fmt(m.f1), _fmt(m.support)]
            )


def parse_report_csv(path) -> dict:
    """Read back what write_report produced (used by round-trip checks)."""
    out = {"descriptor": {}, "per_class": {}, "macro": None, "accuracy": None}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            section = row[0]
            if section == "descriptor":
                out["descriptor"][row[1]] = row[2]
            elif section == "macro":
                out["macro"] = (float(row[2]), float(row[3]), float(row[4]))
            elif section == "accuracy":
                out["accuracy"] = float(row[2])
            elif section == "class":
                out["per_class"][row[1]] = (float(row[2]), float(row[3]), float(row[4]))
    return out


def write_metrics_table(reports, path) -> None:
    """The four-row ablation table: one row per model/feature-mode pair."""
    write_rows(
        path,
        ["model", "features", "f1", "precision", "recall"],
        [
            (
                r.descriptor["model"],
                r.descriptor["features"],
                r.macro_f1,
                r.macro_precision,
                r.macro_recall,
            )
            for r in reports
        ],
    )


def write_per_disease_f1(report: EvalReport, path) -> None:
    write_rows(path, ["disease", "f1"], per_disease_f1(report))


def write_confusion(report: EvalReport, path) -> None:
    header = ["true\\pred"] + list(report.class_names)
    rows = [
        [name] + report.confusion[i].tolist()
        for i, name in enumerate(report.class_names)
    ]
    write_rows(path, header, rows)


def write_probabilities(class_names, true_labels, probabilities, path) -> None:
    """Per-test-row class probabilities (the predictability export)."""
    header = ["row", "true_disease"] + list(class_names)
    rows = []
    for i, (label, probs) in enumerate(zip(true_labels, probabilities)):
        rows.append([i, class_names[int(label)]] + [p for p in probs])
    write_rows(path, header, rows)


def write_occurrence_histogram(occ, path) -> None:
    write_rows(
        path,
        ["occurrence", "symptom_count"],
        sorted(occ.histogram.items()),
    )


def write_uniqueness(report, path) -> None:
    rows = [
        (d, u, t, r)
        for d, u, t, r in zip(
            report.diseases, report.unusual_counts, report.total_counts, report.rates
        )
    ]
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(["disease", "unusual", "total", "rate"])
        for d, u, t, r in rows:
            writer.writerow([d, _fmt(u), _fmt(t), _fmt(r)])
        writer.writerow(
            [
                "average_excluding_zero_unusual",
                "",
                "",
                _fmt(report.average_rate) if report.average_rate is not None else "absent",
            ]
        )


def write_common_unusual(report, path) -> None:
    """Per-disease common vs unusual symptom counts."""
    rows = [
        (d, t - u, u)
        for d, u, t in zip(report.diseases, report.unusual_counts, report.total_counts)
    ]
    write_rows(path, ["disease", "common", "unusual"], rows)


def write_similarity(profile_names, sim, path) -> None:
    header = ["disease"] + list(profile_names)
    rows = [[name] + [v for v in sim[i]] for i, name in enumerate(profile_names)]
    write_rows(path, header, rows)


def write_sweep(results, path) -> None:
    """(k, mean accuracy, per-fold accuracies) rows from the PCA sweep."""
    n_folds = len(results[0][2]) if results else 0
    header = ["k", "mean_accuracy"] + [f"fold_{i}" for i in range(n_folds)]
    rows = [[k, acc] + list(folds) for k, acc, folds in results]
    write_rows(path, header, rows)


def write_silhouette_series(series, path) -> None:
    """(k, silhouette, objective) rows from the cluster sweep."""
    write_rows(path, ["k", "silhouette", "objective"], series)


def write_memberships(names, assignments, path, label="row") -> None:
    write_rows(
        path,
        [label, "cluster"],
        [(name, int(c)) for name, c in zip(names, assignments)],
    )


def write_loss_history(history, path) -> None:
    write_rows(path, ["epoch", "loss"], list(enumerate(history)))


def write_json(payload: dict, path) -> None:
    try:
        Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
