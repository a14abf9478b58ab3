import json

import pytest

from symptomlab.cli import main


def run(argv):
    return main(argv)


@pytest.fixture(scope="module")
def corpus_csv(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli")
    path = tmp / "corpus.csv"
    code = run([
        "synth", "--out", str(path), "--diseases", "6", "--records", "24",
        "--pool-min", "4", "--pool-max", "7", "--unusual-fraction", "0.4",
        "--seed", "5",
    ])
    assert code == 0
    return path


class TestExitCodes:
    def test_usage_error_is_1(self):
        assert run(["eval"]) == 1  # missing required --out
        assert run(["no-such-command"]) == 1

    def test_data_error_is_2(self, tmp_path):
        assert run(["ingest", "--data", str(tmp_path / "missing.csv")]) == 2

    def test_malformed_dataset_is_2(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("Disease,S1\nflu,cough\nempty, \n")
        assert run(["ingest", "--data", str(bad)]) == 2

    def test_success_is_0(self, corpus_csv):
        assert run(["ingest", "--data", str(corpus_csv)]) == 0


class TestIngest:
    def test_summary_json(self, corpus_csv, tmp_path):
        out = tmp_path / "summary.json"
        assert run(["ingest", "--data", str(corpus_csv), "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["records"] == 144
        assert payload["diseases"] == 6


class TestAnalyze:
    def test_exports_and_figures(self, corpus_csv, tmp_path):
        out = tmp_path / "analyze"
        assert run(["analyze", "--data", str(corpus_csv), "--out", str(out)]) == 0
        for name in (
            "occurrence_histogram.csv",
            "common_unusual.csv",
            "uniqueness.csv",
            "similarity.csv",
            "occurrence_histogram.png",
            "common_unusual.png",
        ):
            assert (out / name).is_file() and (out / name).stat().st_size > 0

    def test_histogram_totals_vocabulary(self, corpus_csv, tmp_path):
        out = tmp_path / "analyze2"
        run(["analyze", "--data", str(corpus_csv), "--out", str(out)])
        lines = (out / "occurrence_histogram.csv").read_text().strip().split("\n")[1:]
        total = sum(int(line.split(",")[1]) for line in lines)
        sim_header = (out / "similarity.csv").read_text().split("\n", 1)[0]
        uniq_lines = (out / "uniqueness.csv").read_text().strip().split("\n")
        assert total > 0
        assert sim_header.startswith("disease,")
        assert uniq_lines[-1].startswith("average_excluding_zero_unusual")


class TestEval:
    def test_eval_lssvm_outputs(self, corpus_csv, tmp_path):
        out = tmp_path / "eval"
        assert run([
            "eval", "--data", str(corpus_csv), "--model", "lssvm",
            "--seed", "3", "--out", str(out),
        ]) == 0
        for name in (
            "report.csv", "report.json", "per_disease_f1.csv",
            "confusion.csv", "probabilities.csv", "confusion.png",
        ):
            assert (out / name).is_file()
        payload = json.loads((out / "report.json").read_text())
        assert payload["descriptor"]["model"] == "lssvm"
        assert 0.0 <= payload["macro"]["f1"] <= 1.0

    def test_synthetic_fallback_without_data(self, tmp_path):
        out = tmp_path / "eval_synth"
        assert run([
            "eval", "--model", "lssvm", "--out", str(out),
            "--synth-diseases", "5", "--synth-records", "20",
            "--synth-pool-min", "3", "--synth-pool-max", "6",
            "--synth-unusual", "0.5", "--synth-seed", "2",
        ]) == 0
        payload = json.loads((out / "report.json").read_text())
        assert payload["descriptor"]["source"].startswith("synthetic")

    def test_config_file(self, corpus_csv, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "data": str(corpus_csv), "model": "lssvm", "seed": 7,
            "gamma": 5.0,
        }))
        out = tmp_path / "eval_cfg"
        assert run(["eval", "--config", str(cfg), "--out", str(out)]) == 0
        payload = json.loads((out / "report.json").read_text())
        assert payload["descriptor"]["seed"] == 7


class TestAblate:
    def test_four_rows(self, corpus_csv, tmp_path):
        out = tmp_path / "ablate"
        assert run([
            "ablate", "--data", str(corpus_csv), "--seed", "3", "--out", str(out),
        ]) == 0
        lines = (out / "metrics_table.csv").read_text().strip().split("\n")
        assert len(lines) == 5
        assert lines[0] == "model,features,f1,precision,recall"
        models = [line.split(",")[0] for line in lines[1:]]
        assert models == ["lssvm", "lssvm", "cnn", "cnn"]


class TestSweeps:
    def test_pca_sweep(self, corpus_csv, tmp_path):
        out = tmp_path / "pca"
        assert run([
            "pca-sweep", "--data", str(corpus_csv), "--k-list", "1,2,4",
            "--folds", "3", "--out", str(out),
        ]) == 0
        lines = (out / "pca_sweep.csv").read_text().strip().split("\n")
        assert len(lines) == 4
        assert (out / "pca_sweep.png").is_file()

    def test_cluster_sweep(self, corpus_csv, tmp_path):
        out = tmp_path / "clu"
        assert run([
            "cluster", "--data", str(corpus_csv), "--k-min", "2", "--k-max", "6",
            "--restarts", "3", "--pca-components", "3", "--out", str(out),
        ]) == 0
        for name in (
            "silhouette_all.csv", "silhouette_pca.csv",
            "silhouette_sweep.png", "memberships.csv",
        ):
            assert (out / name).is_file()
        rows = (out / "memberships.csv").read_text().strip().split("\n")[1:]
        assert len(rows) == 144


class TestCv:
    def test_cv_csv(self, corpus_csv, tmp_path):
        out = tmp_path / "cv"
        assert run([
            "cv", "--data", str(corpus_csv), "--model", "lssvm", "--folds", "3",
            "--out", str(out),
        ]) == 0
        lines = (out / "cv.csv").read_text().strip().split("\n")
        assert len(lines) == 4


class TestTrainServe:
    def test_bundle_loadable(self, corpus_csv, tmp_path):
        out = tmp_path / "bundle"
        assert run([
            "train", "--data", str(corpus_csv), "--model", "lssvm",
            "--seed", "2", "--out", str(out),
        ]) == 0
        from symptomlab import service

        state = service.load_state(out)
        assert "lssvm" in state.models
        assert len(state.diseases) == 6
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["models"] == ["lssvm"]

    def test_determinism_byte_identical_bundles(self, corpus_csv, tmp_path):
        a, b = tmp_path / "b1", tmp_path / "b2"
        for out in (a, b):
            assert run([
                "train", "--data", str(corpus_csv), "--model", "lssvm",
                "--seed", "2", "--out", str(out),
            ]) == 0
        for name in ("vocabulary.json", "profiles.json", "clusters.json",
                     "lssvm.json", "manifest.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()


class TestReport:
    def test_bundles_everything(self, tmp_path):
        out = tmp_path / "report"
        assert run([
            "report", "--out", str(out),
            "--synth-diseases", "5", "--synth-records", "20",
            "--synth-pool-min", "3", "--synth-pool-max", "6",
            "--synth-unusual", "0.5", "--synth-seed", "4",
            "--folds", "3",
        ]) == 0
        assert (out / "analyze" / "occurrence_histogram.csv").is_file()
        assert (out / "ablate" / "metrics_table.csv").is_file()
        assert (out / "cv" / "cv.csv").is_file()
        assert (out / "pca_sweep" / "pca_sweep.png").is_file()
        assert (out / "cluster" / "silhouette_sweep.png").is_file()
