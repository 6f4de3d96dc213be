"""Single-label classification metrics and result rows."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

RESULT_FIELDS = [
    "dataset", "model", "accuracy", "balanced_accuracy", "hamming_loss",
    "macro_f1", "micro_f1", "train_seconds", "test_seconds",
]
METRIC_FIELDS = RESULT_FIELDS[2:7]


@dataclass
class EvalResult:
    accuracy: float
    balanced_accuracy: float
    hamming_loss: float
    macro_f1: float
    micro_f1: float
    confusion: np.ndarray

    def metrics(self) -> dict:
        return {k: getattr(self, k) for k in METRIC_FIELDS}


def confusion_matrix(y_true, y_pred, n_classes) -> np.ndarray:
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    if y_true.shape != y_pred.shape:
        raise ValueError("y_true and y_pred differ in length")
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (y_true, y_pred), 1)
    return cm


def _ratio(num, den, exact):
    if den == 0:
        return Fraction(0) if exact else 0.0
    return Fraction(int(num), int(den)) if exact else num / den


def metrics_from_confusion(cm, exact=False) -> EvalResult:
    """Metrics of a confusion matrix (rows = truth, columns = prediction).

    Balanced accuracy averages recall over classes present in the truth.
    Macro F1 averages over every class; a class with no true and no
    predicted members scores 0. ``exact=True`` returns ``Fraction`` values.
    """
    cm = np.asarray(cm, dtype=np.int64)
    n = int(cm.sum())
    if n == 0:
        raise ValueError("cannot score an empty prediction set")
    tp = np.diag(cm).astype(np.int64)
    support = cm.sum(axis=1)
    predicted = cm.sum(axis=0)
    correct = int(tp.sum())

    accuracy = _ratio(correct, n, exact)
    hamming = _ratio(n - correct, n, exact)

    present = np.flatnonzero(support > 0)
    recalls = [_ratio(tp[c], support[c], exact) for c in present]
    balanced = sum(recalls, Fraction(0) if exact else 0.0) / len(recalls)

    f1s = [_ratio(2 * tp[c], support[c] + predicted[c], exact) for c in range(cm.shape[0])]
    macro = sum(f1s, Fraction(0) if exact else 0.0) / len(f1s)

    fp = int(predicted.sum() - correct)
    fn = int(support.sum() - correct)
    micro = _ratio(2 * correct, 2 * correct + fp + fn, exact)
    return EvalResult(accuracy, balanced, hamming, macro, micro, cm)


def score_predictions(y_true, y_pred, n_classes, exact=False) -> EvalResult:
    return metrics_from_confusion(confusion_matrix(y_true, y_pred, n_classes), exact)


def evaluate(model, test) -> EvalResult:
    """Score a fitted classifier on a labelled :class:`~miht.datasets.Dataset`."""
    classes = [str(c) for c in model.classes_]
    if sorted(classes) != sorted(test.class_names):
        raise ValueError(f"class sets differ: model {classes} vs test {test.class_names}")
    if (test.labels < 0).any():
        raise ValueError("test set has unlabelled series")
    lookup = {c: i for i, c in enumerate(classes)}
    y_true = [lookup[name] for name in test.label_names()]
    y_pred = [lookup[str(c)] for c in model.predict(test)]
    return score_predictions(y_true, y_pred, len(classes))


def result_row(dataset, model, result: EvalResult | None, train_seconds=None, test_seconds=None) -> dict:
    """One results-table row; a missing ``result`` gives a failed ``-`` row."""
    row = {"dataset": dataset, "model": model}
    for k in METRIC_FIELDS:
        row[k] = "-" if result is None else f"{float(getattr(result, k)):.6f}"
    for k, v in (("train_seconds", train_seconds), ("test_seconds", test_seconds)):
        if result is None:
            row[k] = "-"
        else:
            row[k] = "" if v is None else f"{v:.3f}"
    return row


def rows_to_csv(rows, header=True) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=RESULT_FIELDS, lineterminator="\n")
    if header:
        writer.writeheader()
    writer.writerows(rows)
    return out.getvalue()


def rows_to_json(rows) -> str:
    return json.dumps(rows, indent=2) + "\n"
