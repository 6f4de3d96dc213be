"""Bag-level prediction and relevant-segment explanations."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .bagging import ResolvedParams, build_bag
from .hoeffding import HoeffdingTree
from .trainer import select_tau


@dataclass
class PredictionReport:
    predicted: int
    instance_classes: np.ndarray
    instance_proba: np.ndarray
    tie_broken_by_proba: bool = False

    def __len__(self):
        return len(self.instance_classes)


@dataclass
class Explanation:
    predicted: int
    start_instance: int
    start_step: int
    end_step: int
    likelihoods: np.ndarray
    series_length: int

    def relevant_mask(self) -> np.ndarray:
        mask = np.zeros(self.series_length, dtype=bool)
        mask[self.start_step:self.end_step] = True
        return mask

    def to_dict(self, class_names=None):
        return {
            "predicted": class_names[self.predicted] if class_names is not None else self.predicted,
            "start_instance": self.start_instance,
            "span": [self.start_step, self.end_step],
            "series_length": self.series_length,
            "likelihoods": self.likelihoods.tolist(),
        }

    def to_json(self, class_names=None, **kwargs):
        return json.dumps(self.to_dict(class_names), **kwargs)

    def to_csv(self, values) -> str:
        """``step,dim0,...,relevant_flag`` rows for external plotting."""
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["step", *[f"dim{d}" for d in range(values.shape[1])], "relevant_flag"])
        mask = self.relevant_mask()
        for t, row in enumerate(values):
            writer.writerow([t, *[repr(float(v)) for v in row], int(mask[t])])
        return out.getvalue()


def mode_with_tiebreak(classes, proba) -> tuple[int, bool]:
    """Most frequent class; ties go to the larger summed probability, then the lowest index."""
    n_classes = proba.shape[1]
    counts = np.bincount(classes, minlength=n_classes)
    tied = np.flatnonzero(counts == counts.max())
    if tied.size == 1:
        return int(tied[0]), False
    mass = proba[:, tied].sum(axis=0)
    return int(tied[np.argmax(mass)]), True


def _check(tree, params, values):
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if params.n_attributes(values.shape[1]) != tree.n_attributes:
        raise ValueError(
            f"series with {values.shape[1]} dimensions gives {params.n_attributes(values.shape[1])} "
            f"attributes; the model expects {tree.n_attributes}"
        )
    return values


def predict(tree: HoeffdingTree, params: ResolvedParams, values) -> PredictionReport:
    values = _check(tree, params, values)
    bag = build_bag(values, params)
    classes, proba = tree.classify(bag.instances)
    predicted, tie = mode_with_tiebreak(classes, proba)
    return PredictionReport(predicted, classes, proba, tie)


def explanation_span(start: int, params: ResolvedParams, n_instances: int, length: int) -> tuple[int, int]:
    """Original time steps covered by the ``k`` windows starting at instance ``start``."""
    width = min(params.k, n_instances)
    start_step = start * params.stride
    end_step = min(start_step + (width - 1) * params.stride + params.window, length)
    return start_step, end_step


def explain(tree: HoeffdingTree, params: ResolvedParams, values) -> Explanation:
    """Predict, then locate the ``k`` consecutive windows most likely under the prediction."""
    values = _check(tree, params, values)
    report = predict(tree, params, values)
    lik = report.instance_proba[:, report.predicted]
    start, _ = select_tau(lik, params.k)
    length = values.shape[0]
    start_step, end_step = explanation_span(start, params, len(lik), length)
    return Explanation(report.predicted, start, start_step, end_step, lik, length)
