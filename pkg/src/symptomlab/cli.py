"""Command-line interface: every figure and table maps to one subcommand.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from . import cluster as cl
from . import convnet, exports, lssvm, reduce, symptomnet
from . import experiment as ex
from .corpus import corpus_summary, save_corpus, synth_generate
from .errors import DataError, NumericalError
from .metrics import per_disease_f1

log = logging.getLogger("symptomlab")

DEFAULT_SWEEP_KS = list(range(1, 11)) + [12, 16, 20, 24, 32]


def _load_config_file(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"config file {path} is not valid JSON: {exc}") from exc


def build_experiment_config(
    config_path,
    data,
    severity,
    model=None,
    features=None,
    seed=None,
    **overrides,
) -> ex.ExperimentConfig:
    """Merge config-file values with CLI flags (flags win)."""
    raw = _load_config_file(config_path) if config_path else {}
    synth_raw = raw.get("synth") or {}
    synth = ex.SynthSpec(**synth_raw)
    cfg = dict(
        data_path=raw.get("data"),
        severity_path=raw.get("severity"),
        synth=synth,
        model=raw.get("model", "lssvm"),
        features=raw.get("features", "all"),
        encoding=raw.get("encoding", "binary"),
        test_fraction=raw.get("test_fraction", 0.2),
        seed=raw.get("seed", 0),
        sigma=raw.get("sigma"),
        gamma=raw.get("gamma", 10.0),
        cnn_epochs=raw.get("cnn_epochs", 30),
        cnn_learning_rate=raw.get("cnn_learning_rate", 0.05),
        cnn_batch_size=raw.get("cnn_batch_size", 32),
    )
    if data is not None:
        cfg["data_path"] = str(data)
    if severity is not None:
        cfg["severity_path"] = str(severity)
    if model is not None:
        cfg["model"] = model
    if features is not None:
        cfg["features"] = features
    if seed is not None:
        cfg["seed"] = seed
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    if cfg["data_path"] is not None:
        cfg["synth"] = None
    return ex.ExperimentConfig(**cfg)


def _outdir(out) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


data_option = click.option("--data", type=click.Path(), default=None,
                           help="Dataset CSV (omit to use a synthetic corpus).")
severity_option = click.option("--severity", type=click.Path(), default=None,
                               help="Optional severity CSV.")
config_option = click.option("--config", "config_path", type=click.Path(),
                             default=None, help="JSON config file.")
seed_option = click.option("--seed", type=int, default=None, help="Random seed.")
synth_options = [
    click.option("--synth-diseases", type=int, default=None),
    click.option("--synth-records", type=int, default=None),
    click.option("--synth-pool-min", type=int, default=None),
    click.option("--synth-pool-max", type=int, default=None),
    click.option("--synth-unusual", type=float, default=None),
    click.option("--synth-seed", type=int, default=None),
]


def with_synth_options(fn):
    for opt in reversed(synth_options):
        fn = opt(fn)
    return fn


def apply_synth_overrides(cfg: ex.ExperimentConfig, diseases, records,
                          pool_min, pool_max, unusual, seed) -> ex.ExperimentConfig:
    if cfg.synth is None:
        return cfg
    synth = cfg.synth
    if diseases is not None:
        synth = replace(synth, diseases=diseases)
    if records is not None:
        synth = replace(synth, records=records)
    if pool_min is not None:
        synth = replace(synth, pool_min=pool_min)
    if pool_max is not None:
        synth = replace(synth, pool_max=pool_max)
    if unusual is not None:
        synth = replace(synth, unusual_fraction=unusual)
    if seed is not None:
        synth = replace(synth, seed=seed)
    return replace(cfg, synth=synth)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable info logging.")
def cli(verbose):
    """Disease-symptom analytics: network stats, classifiers, clustering,
    and a triage service."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@data_option
@severity_option
@click.option("--out", type=click.Path(), default=None, help="Write summary JSON here.")
def ingest(data, severity, out):
    """Validate a dataset file and print its summary."""
    if data is None:
        raise click.UsageError("ingest requires --data")
    cfg = build_experiment_config(None, data, severity)
    prep = ex.prepare(cfg)
    summary = corpus_summary(prep.corpus)
    rates = symptomnet.uniqueness_report(prep.profiles, prep.occurrence)
    click.echo(f"records: {summary['records']}")
    click.echo(f"diseases: {summary['diseases']}")
    click.echo(f"symptoms: {summary['symptoms']}")
    click.echo(f"max symptoms per record: {summary['max_symptoms_per_record']}")
    avg = rates.average_rate
    click.echo(
        "mean uniqueness rate (nonzero diseases): "
        + (f"{avg:.4f}" if avg is not None else "absent")
    )
    if out:
        payload = dict(summary)
        payload["mean_uniqueness_rate"] = avg
        exports.write_json(payload, out)
        click.echo(f"wrote {out}")


@cli.command()
@click.option("--out", type=click.Path(), required=True, help="Output CSV path.")
@click.option("--diseases", type=int, default=41, show_default=True)
@click.option("--records", type=int, default=120, show_default=True)
@click.option("--pool-min", type=int, default=5, show_default=True)
@click.option("--pool-max", type=int, default=18, show_default=True)
@click.option("--unusual-fraction", type=float, default=0.39, show_default=True)
@seed_option
def synth(out, diseases, records, pool_min, pool_max, unusual_fraction, seed):
    """Generate a statistically matched synthetic corpus CSV."""
    corpus = synth_generate(
        diseases, records, (pool_min, pool_max), unusual_fraction, seed or 0
    )
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    save_corpus(corpus, out)
    click.echo(f"wrote {len(corpus.records)} records to {out}")


@cli.command()
@data_option
@severity_option
@config_option
@seed_option
@with_synth_options
@click.option("--out", type=click.Path(), required=True, help="Output directory.")
def analyze(data, severity, config_path, seed, out, **synth_kw):
    """Network statistics: occurrence histogram, uniqueness, similarity."""
    cfg = build_experiment_config(config_path, data, severity, seed=seed)
    cfg = apply_synth_overrides(cfg, *(synth_kw[k] for k in (
        "synth_diseases", "synth_records", "synth_pool_min",
        "synth_pool_max", "synth_unusual", "synth_seed")))
    prep = ex.prepare(cfg)
    outdir = _outdir(out)
    occ = prep.occurrence
    uniq = symptomnet.uniqueness_report(prep.profiles, occ)
    sim, disjoint = symptomnet.similarity_matrix(prep.profiles)
    exports.write_occurrence_histogram(occ, outdir / "occurrence_histogram.csv")
    exports.write_common_unusual(uniq, outdir / "common_unusual.csv")
    exports.write_uniqueness(uniq, outdir / "uniqueness.csv")
    names = [p.disease for p in prep.profiles]
    exports.write_similarity(names, sim, outdir / "similarity.csv")
    from . import figures

    figures.occurrence_histogram(occ, outdir / "occurrence_histogram.png")
    figures.common_unusual(uniq, outdir / "common_unusual.png")
    n = len(names)
    total_pairs = n * (n - 1) // 2
    click.echo(f"histogram: {dict(occ.histogram)}")
    avg = uniq.average_rate
    click.echo(
        "mean uniqueness rate: " + (f"{avg:.4f}" if avg is not None else "absent")
    )
    click.echo(f"disjoint pairs: {disjoint} of {total_pairs}")
    click.echo(f"exports in {outdir}")


@cli.command()
@data_option
@severity_option
@config_option
@seed_option
@with_synth_options
@click.option("--model", type=click.Choice(["lssvm", "cnn", "both"]), default="both",
              show_default=True)
@click.option("--features", type=click.Choice(["all", "common_only"]), default=None)
@click.option("--clusters", "cluster_k", type=int, default=7, show_default=True,
              help="Disease-profile cluster count stored in the bundle.")
@click.option("--out", type=click.Path(), required=True, help="Bundle directory.")
def train(data, severity, config_path, seed, model, features, cluster_k, out, **synth_kw):
    """Train on the full dataset and persist a serving bundle."""
    from . import service

    cfg = build_experiment_config(config_path, data, severity,
                                  features=features, seed=seed)
    cfg = apply_synth_overrides(cfg, *(synth_kw[k] for k in (
        "synth_diseases", "synth_records", "synth_pool_min",
        "synth_pool_max", "synth_unusual", "synth_seed")))
    prep = ex.prepare(cfg)
    outdir = _outdir(out)
    vocab_hash = prep.vocabulary.content_hash()
    subset = symptomnet.feature_subset(prep.vocabulary, prep.occurrence, cfg.features)
    sub = prep.matrix.with_columns(subset)

    service.write_vocabulary(prep.vocabulary, outdir / "vocabulary.json")
    service.write_profiles(prep.profiles, vocab_hash, outdir / "profiles.json")

    incidence = np.vstack([p.incidence for p in prep.profiles])
    k = min(max(2, cluster_k), len(prep.profiles))
    clustering = cl.kmeans_cosine(incidence, k=k, seed=cfg.seed, restarts=10)
    service.write_clusters(
        [p.disease for p in prep.profiles],
        clustering.assignments,
        k,
        clustering.silhouette,
        vocab_hash,
        outdir / "clusters.json",
    )

    wanted = ("lssvm", "cnn") if model == "both" else (model,)
    for name in wanted:
        run_cfg = replace(cfg, model=name)
        trained = ex.train_model(run_cfg, sub, subset)
        if name == "cnn":
            trained, history = trained
            exports.write_loss_history(history, outdir / "cnn_loss_history.csv")
            convnet.save_model(trained, outdir / "cnn.json")
        else:
            lssvm.save_model(trained, outdir / "lssvm.json")
        click.echo(f"trained {name}")
    manifest = {
        "schema": service.MANIFEST_SCHEMA,
        "features": cfg.features,
        "seed": cfg.seed,
        "source": prep.source,
        "models": list(wanted),
        "vocab_hash": vocab_hash,
    }
    exports.write_json(manifest, outdir / "manifest.json")
    click.echo(f"bundle written to {outdir}")


@cli.command("eval")
@data_option
@severity_option
@config_option
@seed_option
@with_synth_options
@click.option("--model", type=click.Choice(["lssvm", "cnn"]), default=None)
@click.option("--features", type=click.Choice(["all", "common_only"]), default=None)
@click.option("--out", type=click.Path(), required=True, help="Output directory.")
def eval_cmd(data, severity, config_path, seed, model, features, out, **synth_kw):
    """Train/evaluate one 80/20 split and export the evaluation report."""
    cfg = build_experiment_config(config_path, data, severity,
                                  model=model, features=features, seed=seed)
    cfg = apply_synth_overrides(cfg, *(synth_kw[k] for k in (
        "synth_diseases", "synth_records", "synth_pool_min",
        "synth_pool_max", "synth_unusual", "synth_seed")))
    result = ex.run_experiment_full(cfg)
    outdir = _outdir(out)
    report = result.report
    exports.write_report(report, outdir / "report.csv")
    exports.write_report(report, outdir / "report.json", "json")
    exports.write_per_disease_f1(report, outdir / "per_disease_f1.csv")
    exports.write_confusion(report, outdir / "confusion.csv")
    exports.write_probabilities(
        report.class_names,
        result.test_labels,
        result.test_probabilities,
        outdir / "probabilities.csv",
    )
    from . import figures

    figures.confusion_heatmap(report, outdir / "confusion.png")
    if result.loss_history is not None:
        exports.write_loss_history(result.loss_history, outdir / "loss_history.csv")
        figures.loss_history(result.loss_history, outdir / "loss_history.png")
    click.echo(
        f"{cfg.model} ({cfg.features}) macro F1={report.macro_f1:.4f} "
        f"P={report.macro_precision:.4f} R={report.macro_recall:.4f}"
    )
    click.echo(f"exports in {outdir}")


@cli.command()
@data_option
@severity_option
@config_option
@seed_option
@with_synth_options
@click.option("--out", type=click.Path(), required=True, help="Output directory.")
def ablate(data, severity, config_path, seed, out, **synth_kw):
    """All four model/feature-mode rows of the evaluation table."""
    cfg = build_experiment_config(config_path, data, severity, seed=seed)
    cfg = apply_synth_overrides(cfg, *(synth_kw[k] for k in (
        "synth_diseases", "synth_records", "synth_pool_min",
        "synth_pool_max", "synth_unusual", "synth_seed")))
    reports = ex.ablate(cfg)
    outdir = _outdir(out)
    exports.write_metrics_table(reports, outdir / "metrics_table.csv")
    for report in reports:
        tag = f"{report.descriptor['model']}_{report.descriptor['features']}"
        exports.write_report(report, outdir / f"report_{tag}.csv")
        click.echo(
            f"{report.descriptor['model']:5s} {report.descriptor['features']:11s} "
            f"F1={report.macro_f1:.4f} P={report.macro_precision:.4f} "
            f"R={report.macro_recall:.4f}"
        )
    click.echo(f"exports in {outdir}")


@cli.command()
@data_option
@severity_option
@config_option
@seed_option
@with_synth_options
@click.option("--model", type=click.Choice(["lssvm", "cnn"]), default=None)
@click.option("--features", type=click.Choice(["all", "common_only"]), default=None)
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Output directory.")
def cv(data, severity, config_path, seed, model, features, folds, out, **synth_kw):
    """Stratified k-fold cross-validation for one model."""
    cfg = build_experiment_config(config_path, data, severity,
                                  model=model, features=features, seed=seed)
    cfg = apply_synth_overrides(cfg, *(synth_kw[k] for k in (
        "synth_diseases", "synth_records", "synth_pool_min",
        "synth_pool_max", "synth_unusual", "synth_seed")))
    rows = ex.cross_validate(cfg, folds)
    mean_acc = float(np.mean([r["accuracy"] for r in rows]))
    mean_f1 = float(np.mean([r["macro_f1"] for r in rows]))
    for row in rows:
        click.echo(
            f"fold {row['fold']}: accuracy={row['accuracy']:.4f} "
            f"macro_f1={row['macro_f1']:.4f}"
        )
    click.echo(f"mean accuracy={mean_acc:.4f} mean macro_f1={mean_f1:.4f}")
    if out:
        outdir = _outdir(out)
        exports.write_rows(
            outdir / "cv.csv",
            ["fold", "accuracy", "macro_f1"],
            [(r["fold"], r["accuracy"], r["macro_f1"]) for r in rows],
        )
        click.echo(f"exports in {outdir}")


@cli.command("pca-sweep")
@data_option
@severity_option
@config_option
@seed_option
@with_synth_options
@click.option("--k-list", default=None,
              help="Comma-separated component counts (default 1..10,12,16,20,24,32).")
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--out", type=click.Path(), required=True, help="Output directory.")
def pca_sweep(data, severity, config_path, seed, k_list, folds, out, **synth_kw):
    """Cross-validated accuracy against retained PCA component count."""
    cfg = build_experiment_config(config_path, data, severity, seed=seed)
    cfg = apply_synth_overrides(cfg, *(synth_kw[k] for k in (
        "synth_diseases", "synth_records", "synth_pool_min",
        "synth_pool_max", "synth_unusual", "synth_seed")))
    prep = ex.prepare(cfg)
    d = prep.matrix.n_features
    if k_list:
        ks = [int(v) for v in k_list.split(",") if v.strip()]
    else:
        ks = [k for k in DEFAULT_SWEEP_KS if k <= d]
    results = reduce.component_sweep(prep.matrix, ks, folds, cfg.seed)
    outdir = _outdir(out)
    exports.write_sweep(results, outdir / "pca_sweep.csv")
    from . import figures

    figures.pca_sweep(results, outdir / "pca_sweep.png")
    for k, acc, _ in results:
        click.echo(f"k={k}: mean accuracy={acc:.4f}")
    click.echo(f"selected k: {reduce.select_component_count(results)}")
    click.echo(f"exports in {outdir}")


@cli.command("cluster")
@data_option
@severity_option
@config_option
@seed_option
@with_synth_options
@click.option("--k-min", type=int, default=2, show_default=True)
@click.option("--k-max", type=int, default=None, help="Default: min(40, rows).")
@click.option("--k", "chosen_k", type=int, default=None,
              help="Cluster count for the membership export (default: best silhouette).")
@click.option("--restarts", type=int, default=10, show_default=True)
@click.option("--pca-components", type=int, default=None,
              help="Also sweep a PCA-reduced variant with this many components "
                   "(default: selected by a 5-fold accuracy sweep).")
@click.option("--skip-pca", is_flag=True, help="Only sweep the all-symptom variant.")
@click.option("--out", type=click.Path(), required=True, help="Output directory.")
def cluster_cmd(data, severity, config_path, seed, k_min, k_max, chosen_k,
                restarts, pca_components, skip_pca, out, **synth_kw):
    """K-means sweeps over records: all symptoms and PCA-reduced variants."""
    cfg = build_experiment_config(config_path, data, severity, seed=seed)
    cfg = apply_synth_overrides(cfg, *(synth_kw[k] for k in (
        "synth_diseases", "synth_records", "synth_pool_min",
        "synth_pool_max", "synth_unusual", "synth_seed")))
    prep = ex.prepare(cfg)
    outdir = _outdir(out)
    n = prep.matrix.n_rows
    k_max = min(k_max if k_max is not None else 40, n)
    k_range = range(k_min, k_max + 1)
    series = {}

    all_sweep = cl.k_sweep(prep.matrix.features, k_range, cfg.seed, restarts)
    exports.write_silhouette_series(all_sweep, outdir / "silhouette_all.csv")
    series["all symptoms"] = all_sweep

    if not skip_pca:
        d = prep.matrix.n_features
        if pca_components is None:
            ks = [k for k in DEFAULT_SWEEP_KS if k <= d]
            sweep = reduce.component_sweep(prep.matrix, ks, 5, cfg.seed)
            pca_components = reduce.select_component_count(sweep)
            click.echo(f"selected {pca_components} PCA components")
        basis = reduce.fit_pca(prep.matrix, pca_components)
        projected = reduce.project(basis, prep.matrix)
        pca_sweep_rows = cl.k_sweep(projected.features, k_range, cfg.seed, restarts)
        exports.write_silhouette_series(pca_sweep_rows, outdir / "silhouette_pca.csv")
        series["pca reduced"] = pca_sweep_rows

    from . import figures

    figures.silhouette_sweep(series, outdir / "silhouette_sweep.png")

    best_k = chosen_k or max(all_sweep, key=lambda row: (row[1], -row[0]))[0]
    clustering = cl.kmeans_cosine(
        prep.matrix.features, k=best_k, seed=cfg.seed, restarts=restarts
    )
    row_names = [
        f"{i}:{prep.matrix.class_names[int(label)]}"
        for i, label in enumerate(prep.matrix.labels)
    ]
    exports.write_memberships(
        row_names, clustering.assignments, outdir / "memberships.csv",
        label="row:disease",
    )
    sizes = np.bincount(clustering.assignments, minlength=best_k)
    click.echo(f"k={best_k}: silhouette={clustering.silhouette:.4f} "
               f"sizes={sorted(sizes.tolist(), reverse=True)}")
    click.echo(f"exports in {outdir}")


@cli.command()
@click.option("--model-dir", type=click.Path(), required=True)
@click.option("--addr", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(model_dir, addr, port):
    """Serve trained artifacts over HTTP."""
    import uvicorn

    from . import service

    state = service.load_state(model_dir)
    app = service.create_app(state)
    click.echo(
        f"serving {sorted(state.models)} on http://{addr}:{port} "
        f"({len(state.vocabulary)} symptoms, {len(state.diseases)} diseases)"
    )
    uvicorn.run(app, host=addr, port=port, log_level="warning")


@cli.command()
@data_option
@severity_option
@config_option
@seed_option
@with_synth_options
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--out", type=click.Path(), required=True, help="Output directory.")
@click.pass_context
def report(ctx, data, severity, config_path, seed, folds, out, **synth_kw):
    """Bundle every export: analysis, ablation, CV, PCA sweep, clustering."""
    outdir = _outdir(out)
    common = dict(data=data, severity=severity, config_path=config_path, seed=seed,
                  **synth_kw)
    ctx.invoke(analyze, out=str(outdir / "analyze"), **common)
    ctx.invoke(ablate, out=str(outdir / "ablate"), **common)
    ctx.invoke(cv, model=None, features=None, folds=folds,
               out=str(outdir / "cv"), **common)
    ctx.invoke(pca_sweep, k_list=None, folds=folds,
               out=str(outdir / "pca_sweep"), **common)
    ctx.invoke(cluster_cmd, k_min=2, k_max=None, chosen_k=None, restarts=10,
               pca_components=None, skip_pca=False,
               out=str(outdir / "cluster"), **common)
    click.echo(f"full report in {outdir}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    except NumericalError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return 3
    except OSError as exc:
        click.echo(f"io error: {exc}", err=True)
        return 2
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
