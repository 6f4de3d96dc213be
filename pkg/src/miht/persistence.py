"""Text model files.

Layout: a header line ``MIHT-MODEL <version>`` followed by one JSON
document holding the class labels, resolved window parameters, training
configuration and the full tree (topology, thresholds and every leaf
statistic). Floats are written with ``repr`` so they read back bit-exact.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict

import numpy as np

from .bagging import ResolvedParams
from .hoeffding import HoeffdingTree

MAGIC = "MIHT-MODEL"
SCHEMA_VERSION = 1


class ModelFormatError(ValueError):
    pass


def _open(target, mode):
    if isinstance(target, (str, os.PathLike)):
        return open(target, mode, encoding="utf-8"), True
    return target, False


def dumps_model(model) -> str:
    from .estimator import MIHTClassifier

    if not isinstance(model, MIHTClassifier) or not hasattr(model, "tree_"):
        raise ValueError("only fitted MIHTClassifier instances can be saved")
    doc = {
        "classes": np.asarray(model.classes_).tolist(),
        "n_dims": model.n_dims_,
        "params": asdict(model.params_),
        "estimator": model.get_params(),
        "report": model.fit_report_.to_dict(),
        "tree": model.tree_.to_dict(),
    }
    return f"{MAGIC} {SCHEMA_VERSION}\n" + json.dumps(doc) + "\n"


def loads_model(text: str):
    from .estimator import MIHTClassifier
    from .trainer import FitReport

    header, _, body = text.partition("\n")
    parts = header.split()
    if len(parts) != 2 or parts[0] != MAGIC:
        raise ModelFormatError("not a model file (missing MIHT-MODEL header)")
    if parts[1] != str(SCHEMA_VERSION):
        raise ModelFormatError(f"unsupported model schema version {parts[1]!r}, expected {SCHEMA_VERSION}")
    try:
        doc = json.loads(body)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file is truncated or corrupt: {exc}") from None
    try:
        model = MIHTClassifier(**doc["estimator"])
        model.classes_ = np.array(doc["classes"])
        model.n_dims_ = int(doc["n_dims"])
        model.params_ = ResolvedParams(**doc["params"])
        model.fit_report_ = FitReport(**doc["report"])
        model.tree_ = HoeffdingTree.from_dict(doc["tree"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"model file is incomplete: {exc!r}") from None
    return model


def save_model(model, sink) -> None:
    fh, close = _open(sink, "w")
    try:
        fh.write(dumps_model(model))
    finally:
        if close:
            fh.close()


def load_model(source):
    if hasattr(source, "read"):
        return loads_model(source.read())
    with open(source, encoding="utf-8") as fh:
        return loads_model(fh.read())
