"""Multi-instance training loop around the Hoeffding tree."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .bagging import Bag, ResolvedParams, build_bag, resolve_params
from .datasets import Dataset
from .hoeffding import NB_MODES, HoeffdingTree

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    window: float = 0.21
    stride: float = 0.02
    k: int = 4
    grace_period: float = 3.665
    delta: float = 0.005615
    max_iterations: int = 100
    seed: int = 0
    nb_mode: str = "product"
    tie_threshold: float | None = None

    def __post_init__(self):
        if self.nb_mode not in NB_MODES:
            raise ValueError(f"nb_mode must be one of {NB_MODES}, got {self.nb_mode!r}")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if not 0 < self.delta < 1:
            raise ValueError("delta must be in (0, 1)")


@dataclass
class TauSelection:
    starts: np.ndarray
    scores: np.ndarray


@dataclass
class FitReport:
    iterations: int = 0
    tau_changes: list[int] = field(default_factory=list)
    converged: bool = False
    n_nodes: list[int] = field(default_factory=list)
    tau: TauSelection | None = field(default=None, repr=False)

    def to_dict(self):
        d = asdict(self)
        d.pop("tau")
        return d

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def select_tau(likelihoods, k) -> tuple[int, float]:
    """Start of the ``k`` consecutive likelihoods with the largest sum.

    Bags shorter than ``k`` use the whole bag. Ties go to the earliest start.
    """
    likelihoods = np.asarray(likelihoods, dtype=float)
    width = min(k, likelihoods.size)
    windows = sliding_window_view(likelihoods, width).tolist()
    # correctly rounded sums, so equal windows in any order compare equal
    sums = [math.fsum(w) for w in windows]
    best = max(sums)
    tied = [i for i, v in enumerate(sums) if v == best]
    if len(tied) > 1:
        exact = [sum(map(Fraction, windows[i])) for i in tied]
        tied = [tied[exact.index(max(exact))]]
    return tied[0], sums[tied[0]]


def bag_likelihoods(tree: HoeffdingTree, bag: Bag, target: int) -> np.ndarray:
    return tree.predict_proba(bag.instances)[:, target]


class _BagTable:
    """All bag instances stacked once so a frozen tree can score them in one pass."""

    def __init__(self, bags):
        self.bags = bags
        self.X = np.concatenate([b.instances for b in bags], axis=0)
        sizes = np.array([len(b) for b in bags])
        self.offsets = np.concatenate([[0], np.cumsum(sizes)])
        self.targets = np.repeat([b.label for b in bags], sizes)

    def target_likelihoods(self, tree):
        proba = tree.predict_proba(self.X)
        return proba[np.arange(len(self.targets)), self.targets]

    def select(self, tree, k) -> TauSelection:
        lik = self.target_likelihoods(tree)
        starts = np.empty(len(self.bags), dtype=int)
        scores = np.empty(len(self.bags))
        for i in range(len(self.bags)):
            starts[i], scores[i] = select_tau(lik[self.offsets[i]:self.offsets[i + 1]], k)
        return TauSelection(starts, scores)


def _check_training_set(train: Dataset):
    if len(train) == 0:
        raise ValueError("training set is empty")
    labels = train.labels
    if (labels < 0).any():
        raise ValueError("every training series needs a label")
    if np.unique(labels).size < 2:
        raise ValueError("training set must contain at least two classes")


def fit(train: Dataset, config: TrainConfig = TrainConfig()):
    """Train a tree on ``train``. Returns ``(tree, params, report)``.

    An initial pass feeds every instance of every bag, in dataset order.
    Each later iteration scores all bags against the frozen tree, picks the
    best ``k`` consecutive instances per bag, then feeds only those. The
    loop stops once no selection moves or after ``max_iterations``.
    """
    _check_training_set(train)
    params = resolve_params(train.lengths, config.window, config.stride, config.k, config.grace_period)
    bags = [build_bag(s.values, params, s.label) for s in train.series]
    tree = HoeffdingTree(
        train.n_classes,
        params.n_attributes(train.n_dims),
        delta=config.delta,
        grace_period=params.grace_period,
        tie_threshold=config.tie_threshold,
        nb_mode=config.nb_mode,
    )
    logger.info("resolved window=%d stride=%d k=%d grace_period=%d",
                params.window, params.stride, params.k, params.grace_period)

    for bag in bags:
        for x in bag.instances:
            tree.learn_one(x, bag.label)

    report = FitReport(n_nodes=[tree.n_nodes])
    table = _BagTable(bags)
    previous = None
    for iteration in range(config.max_iterations):
        selection = table.select(tree, params.k)
        changes = len(bags) if previous is None else int(np.count_nonzero(selection.starts != previous))
        report.iterations = iteration + 1
        report.tau_changes.append(changes)
        report.tau = selection
        if previous is not None and changes == 0:
            report.converged = True
            break
        for bag, start in zip(bags, selection.starts):
            for x in bag.instances[start:start + params.k]:
                tree.learn_one(x, bag.label)
        report.n_nodes.append(tree.n_nodes)
        previous = selection.starts
        logger.debug("iteration %d: %d selections moved, %d nodes", iteration + 1, changes, tree.n_nodes)

    return tree, params, report
