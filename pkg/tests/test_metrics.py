import numpy as np
import pytest

from symptomlab import exports, metrics
from symptomlab.errors import DimensionMismatch, EmptyMatrix, LabelOutOfRange


class TestConfusion:
    def test_perfect_diagonal(self):
        cm = metrics.confusion([0, 1, 2, 2], [0, 1, 2, 2], 3)
        assert np.array_equal(cm, np.diag([1, 1, 2]))

    def test_all_predicted_zero(self):
        cm = metrics.confusion([0, 1, 2], [0, 0, 0], 3)
        assert cm[:, 0].tolist() == [1, 1, 1]
        assert cm[:, 1:].sum() == 0

    def test_hand_tally(self):
        true = [0, 0, 0, 1, 1, 1]
        pred = [0, 0, 1, 1, 1, 0]
        cm = metrics.confusion(true, pred, 2)
        assert cm.tolist() == [[2, 1], [1, 2]]
        assert cm.sum() == 6

    def test_label_out_of_range(self):
        with pytest.raises(LabelOutOfRange):
            metrics.confusion([0, 3], [0, 1], 2)

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            metrics.confusion([0, 1], [0], 2)


class TestMacroMetrics:
    def test_perfect(self):
        per_class, p, r, f, acc = metrics.macro_metrics(np.diag([3, 4]))
        assert (p, r, f, acc) == (1.0, 1.0, 1.0, 1.0)
        assert all(m.f1 == 1.0 for m in per_class)

    def test_hand_case(self):
        # [[1,1],[0,2]]: class0 P=1, R=0.5, F1=2/3; class1 P=2/3, R=1, F1=0.8
        per_class, p, r, f, acc = metrics.macro_metrics(np.array([[1, 1], [0, 2]]))
        assert per_class[0].precision == pytest.approx(1.0)
        assert per_class[0].recall == pytest.approx(0.5)
        assert per_class[0].f1 == pytest.approx(2.0 / 3.0)
        assert per_class[1].precision == pytest.approx(2.0 / 3.0)
        assert per_class[1].recall == pytest.approx(1.0)
        assert per_class[1].f1 == pytest.approx(0.8)
        assert f == pytest.approx(11.0 / 15.0)

    def test_zero_denominator_scores_zero(self):
        # class 1 never predicted and never true positive
        cm = np.array([[2, 0], [3, 0]])
        per_class, *_ = metrics.macro_metrics(cm)
        assert per_class[1].precision == 0.0
        assert per_class[1].recall == 0.0
        assert per_class[1].f1 == 0.0

    def test_empty_matrix(self):
        with pytest.raises(EmptyMatrix):
            metrics.macro_metrics(np.zeros((2, 2), dtype=int))

    def test_brute_force_oracle_random_matrices(self):
        rng = np.random.RandomState(0)
        for _ in range(100):
            c = rng.randint(2, 6)
            cm = rng.randint(0, 9, size=(c, c))
            if cm.sum() == 0:
                cm[0, 0] = 1
            per_class, p, r, f, acc = metrics.macro_metrics(cm)
            # independent elementwise recomputation
            f1s = []
            for i in range(c):
                tp = cm[i, i]
                prec = tp / cm[:, i].sum() if cm[:, i].sum() else 0.0
                rec = tp / cm[i, :].sum() if cm[i, :].sum() else 0.0
                f1s.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
                assert per_class[i].precision == pytest.approx(prec)
                assert per_class[i].recall == pytest.approx(rec)
            assert f == pytest.approx(np.mean(f1s))
            assert acc == pytest.approx(np.trace(cm) / cm.sum())


class TestReport:
    def test_per_disease_f1_sorted_with_ties_alphabetical(self):
        cm = np.diag([2, 2, 2])
        report = metrics.build_report({}, cm, ("c", "a", "b"))
        ranked = metrics.per_disease_f1(report)
        assert ranked == [("a", 1.0), ("b", 1.0), ("c", 1.0)]

    def test_ascending_exposes_weakest(self):
        cm = np.array([[1, 1], [0, 2]])
        report = metrics.build_report({}, cm, ("weak", "strong"))
        ranked = metrics.per_disease_f1(report)
        assert ranked[0][0] == "weak"


class TestExports:
    def make_report(self):
        cm = np.array([[1, 1], [0, 2]])
        return metrics.build_report(
            {"model": "lssvm", "features": "all", "seed": 0}, cm, ("a", "b")
        )

    def test_csv_round_trip(self, tmp_path):
        report = self.make_report()
        path = tmp_path / "report.csv"
        exports.write_report(report, path, "csv")
        parsed = exports.parse_report_csv(path)
        assert parsed["macro"][2] == pytest.approx(report.macro_f1)
        assert parsed["per_class"]["a"][2] == pytest.approx(report.per_class[0].f1)
        assert parsed["descriptor"]["model"] == "lssvm"

    def test_reexport_byte_identical(self, tmp_path):
        report = self.make_report()
        p1, p2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
        exports.write_report(report, p1)
        exports.write_report(report, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_json_round_trip(self, tmp_path):
        import json

        report = self.make_report()
        path = tmp_path / "report.json"
        exports.write_report(report, path, "json")
        payload = json.loads(path.read_text())
        assert payload["macro"]["f1"] == report.macro_f1
        assert payload["confusion"] == [[1, 1], [0, 2]]

    def test_table_shape(self, tmp_path):
        reports = []
        for model in ("lssvm", "cnn"):
            for features in ("common_only", "all"):
                cm = np.diag([2, 2])
                reports.append(
                    metrics.build_report(
                        {"model": model, "features": features}, cm, ("a", "b")
                    )
                )
        path = tmp_path / "table.csv"
        exports.write_metrics_table(reports, path)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "model,features,f1,precision,recall"
        assert len(lines) == 5  # header + 4 rows
        assert all(len(line.split(",")) == 5 for line in lines)
