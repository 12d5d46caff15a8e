import numpy as np
import pytest

from milkspec.errors import DegenerateDataError
from milkspec.learn.metrics import (
    ClassificationReport,
    classification_report,
    confusion_matrix,
    render_report_text,
    report_to_dict,
)


class TestConfusionMatrix:
    def test_counts_indexed_true_by_predicted(self):
        matrix = confusion_matrix([0, 0, 1, 1], [0, 1, 1, 1], [0, 1])
        assert matrix.tolist() == [[1, 1], [0, 2]]

    def test_label_outside_class_set(self):
        with pytest.raises(ValueError):
            confusion_matrix([0, 2], [0, 0], [0, 1])


class TestReportMetrics:
    def test_hand_arithmetic_two_class(self):
        report = ClassificationReport(["a", "b"], np.array([[2, 0], [1, 1]]))
        assert report.precision[0] == pytest.approx(2 / 3)
        assert report.recall[0] == pytest.approx(1.0)
        assert report.f1[0] == pytest.approx(0.8)
        assert report.precision[1] == pytest.approx(1.0)
        assert report.recall[1] == pytest.approx(0.5)
        assert report.f1[1] == pytest.approx(2 / 3)
        assert report.accuracy == pytest.approx(0.75)
        assert report.macro_f1 == pytest.approx((0.8 + 2 / 3) / 2)

    def test_perfect_predictions(self):
        report = classification_report([0, 1, 2, 1], [0, 1, 2, 1], ["x", "y", "z"])
        assert report.accuracy == 1.0
        assert np.all(report.precision == 1.0)
        assert np.all(report.recall == 1.0)
        assert report.weighted_f1 == 1.0

    def test_empty_predicted_column_gives_zero_precision(self):
        report = ClassificationReport(["a", "b"], np.array([[3, 0], [2, 0]]))
        assert report.precision[1] == 0.0
        assert report.f1[1] == 0.0

    def test_report_identities_on_random_matrices(self):
        rng = np.random.default_rng(95)
        for _ in range(25):
            size = int(rng.integers(2, 5))
            matrix = rng.integers(0, 10, size=(size, size))
            if matrix.sum() == 0:
                continue
            report = ClassificationReport([f"c{i}" for i in range(size)], matrix)
            assert report.accuracy == pytest.approx(np.trace(matrix) / matrix.sum())
            assert report.weighted_recall == pytest.approx(report.accuracy)
            assert int(report.support.sum()) == report.total
            assert report.macro_precision == pytest.approx(report.precision.mean())

    def test_empty_matrix_rejected(self):
        with pytest.raises(DegenerateDataError):
            ClassificationReport(["a"], np.zeros((1, 1), dtype=int))


EXPECTED_RENDER = (
    "Classification Report Random Forest (Accuracy: 95.92%)\n"
    "\n"
    "GROUP           Precision     Recall   F1-score    Support\n"
    "ASIG                 1.00       0.92       0.96         13\n"
    "CTR                  0.94       0.94       0.94         18\n"
    "SIG                  0.95       1.00       0.97         18\n"
    "\n"
    "Accuracy                                   0.96         49\n"
    "Macro avg            0.96       0.96       0.96         49\n"
    "Weighted avg         0.96       0.96       0.96         49\n"
)


class TestRendering:
    def test_frozen_layout_bytes(self):
        matrix = np.array([[12, 1, 0], [0, 17, 1], [0, 0, 18]])
        report = ClassificationReport(["ASIG", "CTR", "SIG"], matrix)
        text = render_report_text(report, model_label="Random Forest")
        assert text == EXPECTED_RENDER

    def test_accuracy_percentage_two_decimals(self):
        report = ClassificationReport(["a", "b"], np.array([[2, 0], [1, 1]]))
        text = render_report_text(report)
        assert "(Accuracy: 75.00%)" in text

    def test_json_structure(self):
        report = ClassificationReport(["a", "b"], np.array([[2, 0], [1, 1]]))
        payload = report_to_dict(report)
        assert payload["confusion_matrix"] == [[2, 0], [1, 1]]
        assert payload["per_class"][0]["precision"] == pytest.approx(2 / 3)
        assert payload["macro_avg"]["f1"] == pytest.approx((0.8 + 2 / 3) / 2)
        assert payload["total"] == 4
