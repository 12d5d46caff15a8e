"""Confusion matrices and the classification report table."""

from __future__ import annotations

import numpy as np

from milkspec.errors import DegenerateDataError


class ClassificationReport:
    """Per-class precision/recall/F1 plus accuracy and macro/weighted rows.

    Precision of a class with an empty predicted column is 0, recall of a
    class with no true members is 0, and F1 is 0 whenever precision and
    recall are both 0.
    """

    def __init__(self, class_names, confusion: np.ndarray):
        confusion = np.asarray(confusion, dtype=int)
        if confusion.ndim != 2 or confusion.shape[0] != confusion.shape[1]:
            raise ValueError("confusion matrix must be square")
        if len(class_names) != confusion.shape[0]:
            raise ValueError("one class name per confusion row required")
        if confusion.sum() == 0:
            raise DegenerateDataError("empty confusion matrix")
        self.class_names = tuple(str(name) for name in class_names)
        self.confusion = confusion

        true_positive = np.diag(confusion).astype(float)
        predicted = confusion.sum(axis=0).astype(float)
        actual = confusion.sum(axis=1).astype(float)
        with np.errstate(divide="ignore", invalid="ignore"):
            precision = np.where(predicted > 0, true_positive / predicted, 0.0)
            recall = np.where(actual > 0, true_positive / actual, 0.0)
        pr_sum = precision + recall
        f1 = np.where(pr_sum > 0, 2.0 * precision * recall / np.where(pr_sum > 0, pr_sum, 1.0), 0.0)

        self.precision = precision
        self.recall = recall
        self.f1 = f1
        self.support = confusion.sum(axis=1)
        self.total = int(confusion.sum())
        self.accuracy = float(np.trace(confusion)) / self.total
        self.macro_precision = float(precision.mean())
        self.macro_recall = float(recall.mean())
        self.macro_f1 = float(f1.mean())
        weights = self.support / self.total
        self.weighted_precision = float(precision @ weights)
        self.weighted_recall = float(recall @ weights)
        self.weighted_f1 = float(f1 @ weights)


def confusion_matrix(y_true, y_pred, class_values) -> np.ndarray:
    """Counts indexed (true, predicted) in the order of ``class_values``."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise ValueError("y_true and y_pred must share length")
    class_values = list(class_values)
    index = {value: i for i, value in enumerate(class_values)}
    matrix = np.zeros((len(class_values), len(class_values)), dtype=int)
    for t, p in zip(y_true, y_pred):
        if t not in index or p not in index:
            raise ValueError(f"label outside the class set: {t!r} / {p!r}")
        matrix[index[t], index[p]] += 1
    return matrix


def classification_report(y_true, y_pred, class_names, class_values=None) -> ClassificationReport:
    """Build the report from raw labels; ``class_values`` defaults to the
    sorted distinct labels, paired positionally with ``class_names``."""
    if class_values is None:
        class_values = sorted(set(np.asarray(y_true).tolist()) | set(np.asarray(y_pred).tolist()))
    if len(class_names) != len(class_values):
        raise ValueError("class_names and class_values must pair up")
    return ClassificationReport(class_names, confusion_matrix(y_true, y_pred, class_values))


def render_report_text(report: ClassificationReport, model_label: str | None = None) -> str:
    """Fixed-width report: per-class rows then Accuracy / Macro avg /
    Weighted avg, all at two decimals."""
    title = "Classification Report" if model_label is None else f"Classification Report {model_label}"
    title += f" (Accuracy: {report.accuracy * 100:.2f}%)"

    name_width = max(14, max(len(n) for n in report.class_names) + 2, len("Weighted avg") + 2)
    col = 11
    lines = [title, ""]
    lines.append(
        "GROUP".ljust(name_width)
        + "Precision".rjust(col)
        + "Recall".rjust(col)
        + "F1-score".rjust(col)
        + "Support".rjust(col)
    )
    for i, name in enumerate(report.class_names):
        lines.append(
            name.ljust(name_width)
            + f"{report.precision[i]:.2f}".rjust(col)
            + f"{report.recall[i]:.2f}".rjust(col)
            + f"{report.f1[i]:.2f}".rjust(col)
            + f"{report.support[i]:d}".rjust(col)
        )
    lines.append("")
    lines.append(
        "Accuracy".ljust(name_width)
        + "".rjust(col)
        + "".rjust(col)
        + f"{report.accuracy:.2f}".rjust(col)
        + f"{report.total:d}".rjust(col)
    )
    lines.append(
        "Macro avg".ljust(name_width)
        + f"{report.macro_precision:.2f}".rjust(col)
        + f"{report.macro_recall:.2f}".rjust(col)
        + f"{report.macro_f1:.2f}".rjust(col)
        + f"{report.total:d}".rjust(col)
    )
    lines.append(
        "Weighted avg".ljust(name_width)
        + f"{report.weighted_precision:.2f}".rjust(col)
        + f"{report.weighted_recall:.2f}".rjust(col)
        + f"{report.weighted_f1:.2f}".rjust(col)
        + f"{report.total:d}".rjust(col)
    )
    return "\n".join(line.rstrip() for line in lines) + "\n"


def report_to_dict(report: ClassificationReport) -> dict:
    return {
        "class_names": list(report.class_names),
        "confusion_matrix": report.confusion.tolist(),
        "per_class": [
            {
                "name": name,
                "precision": float(report.precision[i]),
                "recall": float(report.recall[i]),
                "f1": float(report.f1[i]),
                "support": int(report.support[i]),
            }
            for i, name in enumerate(report.class_names)
        ],
        "accuracy": report.accuracy,
        "macro_avg": {
            "precision": report.macro_precision,
            "recall": report.macro_recall,
            "f1": report.macro_f1,
        },
        "weighted_avg": {
            "precision": report.weighted_precision,
            "recall": report.weighted_recall,
            "f1": report.weighted_f1,
        },
        "total": report.total,
    }
