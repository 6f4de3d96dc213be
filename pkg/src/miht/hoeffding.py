"""Incremental Hoeffding tree over numeric attributes.

Leaves keep per-class Gaussian estimators for every attribute. Splits are
searched on a fixed grid of thresholds between the observed minimum and
maximum, scored by information gain and accepted once the gap between the
two best attributes exceeds the Hoeffding bound. Leaves answer with an
adaptive Naive Bayes rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

N_SPLIT_POINTS = 10
DENSITY_FLOOR = 1e-300
LOG_DENSITY_FLOOR = math.log(DENSITY_FLOOR)
MIN_VARIANCE = 1e-12
NB_MODES = ("product", "sum")


def hoeffding_bound(value_range: float, delta: float, n: float) -> float:
    """``sqrt(R^2 ln(1/delta) / (2n))``."""
    if not value_range > 0:
        raise ValueError(f"range must be positive, got {value_range}")
    if not 0 < delta <= 1:
        raise ValueError(f"delta must be in (0, 1], got {delta}")
    if not n >= 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return math.sqrt(value_range * value_range * math.log(1.0 / delta) / (2.0 * n))


def _entropy(counts, axis=-1):
    counts = np.asarray(counts, dtype=float)
    total = counts.sum(axis=axis, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(total > 0, counts / total, 0.0)
        terms = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return terms.sum(axis=axis)


def entropy(counts) -> float:
    """Shannon entropy in bits of a (possibly unnormalised) class-weight vector."""
    return float(_entropy(counts))


def info_gain(parent, children) -> float:
    parent = np.asarray(parent, dtype=float)
    total = parent.sum()
    if total <= 0:
        return 0.0
    children = [np.asarray(c, dtype=float) for c in children]
    weighted = sum(c.sum() / total * entropy(c) for c in children)
    return float(entropy(parent) - weighted)


class GaussianObserver:
    """Per-class running Gaussian estimates for every attribute of a leaf.

    Arrays are ``(n_classes, n_attributes)``; updates use the weighted
    Welford recurrence so mean and variance do not depend on arrival order
    beyond rounding.
    """

    def __init__(self, n_classes, n_attributes):
        shape = (n_classes, n_attributes)
        self.weight = np.zeros(shape)
        self.mean = np.zeros(shape)
        self.m2 = np.zeros(shape)
        self.min = np.full(shape, np.inf)
        self.max = np.full(shape, -np.inf)

    def update(self, x, c, w=1.0):
        new_w = self.weight[c] + w
        delta = x - self.mean[c]
        self.mean[c] += delta * (w / new_w)
        self.m2[c] += w * delta * (x - self.mean[c])
        self.weight[c] = new_w
        np.minimum(self.min[c], x, out=self.min[c])
        np.maximum(self.max[c], x, out=self.max[c])

    def variance(self):
        w = self.weight
        with np.errstate(divide="ignore", invalid="ignore"):
            var = np.where(w > 1, self.m2 / (w - 1), 0.0)
        return np.maximum(var, 0.0)

    def log_density(self, X):
        """Floored per-attribute log densities, shape ``(n, n_classes, n_attributes)``."""
        var = self.variance()
        var = np.where(var > 0, var, MIN_VARIANCE)
        diff = X[:, None, :] - self.mean[None]
        logpdf = -0.5 * (np.log(2 * np.pi * var)[None] + diff * diff / var[None])
        logpdf = np.maximum(logpdf, LOG_DENSITY_FLOOR)
        return np.where((self.weight > 0)[None], logpdf, LOG_DENSITY_FLOOR)

    def fraction_below(self, thresholds):
        """Estimated share of each class's mass at or below each threshold.

        ``thresholds`` is ``(n_attributes, n_points)``; returns
        ``(n_classes, n_attributes, n_points)``.
        """
        t = thresholds[None]
        mean = self.mean[:, :, None]
        std = np.sqrt(self.variance())[:, :, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (t - mean) / std
            frac = np.where(std > 0, ndtr(z), (t >= mean).astype(float))
        frac = np.where(t < self.min[:, :, None], 0.0, frac)
        frac = np.where(t >= self.max[:, :, None], 1.0, frac)
        return frac

    def to_dict(self):
        return {k: getattr(self, k).tolist() for k in ("weight", "mean", "m2", "min", "max")}

    @classmethod
    def from_dict(cls, d):
        obj = cls.__new__(cls)
        for k in ("weight", "mean", "m2", "min", "max"):
            setattr(obj, k, np.array(d[k], dtype=float))
        return obj


@dataclass
class SplitCandidate:
    attribute: int | None
    threshold: float | None
    gain: float
    left: np.ndarray | None = None
    right: np.ndarray | None = None

    @property
    def is_null(self):
        return self.attribute is None


class Leaf:
    def __init__(self, n_classes, n_attributes, class_weights=None):
        self.class_weights = (
            np.zeros(n_classes) if class_weights is None else np.array(class_weights, dtype=float)
        )
        self.observer = GaussianObserver(n_classes, n_attributes)
        self.seen_since_attempt = 0.0
        self.nb_correct = 0.0
        self.mc_correct = 0.0

    is_leaf = True

    @property
    def total_weight(self):
        return float(self.class_weights.sum())

    def majority_class(self) -> int:
        return int(np.argmax(self.class_weights))

    def n_observed_classes(self) -> int:
        return int(np.count_nonzero(self.class_weights > 0))

    def likelihood(self, X, nb_mode="product"):
        """Naive Bayes posteriors for the rows of ``X``, using leaf-local priors."""
        X = np.atleast_2d(X)
        n_classes = self.class_weights.size
        total = self.class_weights.sum()
        if total <= 0:
            return np.full((X.shape[0], n_classes), 1.0 / n_classes)
        with np.errstate(divide="ignore"):
            log_prior = np.log(self.class_weights / total)
        logpdf = self.observer.log_density(X)
        if nb_mode == "product":
            log_like = logpdf.sum(axis=2)
        else:
            log_like = np.log(np.exp(logpdf).sum(axis=2))
        scores = log_prior[None] + log_like
        scores -= scores.max(axis=1, keepdims=True)
        proba = np.exp(scores)
        return proba / proba.sum(axis=1, keepdims=True)

    def uses_naive_bayes(self) -> bool:
        return self.nb_correct >= self.mc_correct

    def candidate_splits(self, n_points=N_SPLIT_POINTS) -> list[SplitCandidate]:
        """Best threshold per attribute plus the null split, sorted by gain.

        Empty when fewer than two classes have been observed.
        """
        obs = self.observer
        observed = obs.weight[:, 0] > 0
        if np.count_nonzero(observed) < 2:
            return []
        class_mass = np.where(observed, self.class_weights, 0.0)
        lo = np.where(observed[:, None], obs.min, np.inf).min(axis=0)
        hi = np.where(observed[:, None], obs.max, -np.inf).max(axis=0)
        valid = hi > lo
        candidates = [SplitCandidate(None, None, 0.0)]
        if not valid.any():
            return candidates

        steps = np.arange(1, n_points + 1) / (n_points + 1)
        span = np.where(valid, hi - lo, 0.0)
        base = np.where(valid, lo, 0.0)
        thresholds = base[:, None] + span[:, None] * steps[None, :]
        frac = obs.fraction_below(thresholds)
        left = class_mass[:, None, None] * frac
        right = class_mass[:, None, None] - left
        total = class_mass.sum()
        w_left = left.sum(axis=0)
        w_right = right.sum(axis=0)
        child_entropy = (w_left * _entropy(left, axis=0) + w_right * _entropy(right, axis=0)) / total
        gains = entropy(class_mass) - child_entropy  # (n_attributes, n_points)

        best_point = np.argmax(gains, axis=1)
        for a in np.flatnonzero(valid):
            p = best_point[a]
            candidates.append(
                SplitCandidate(int(a), float(thresholds[a, p]), float(gains[a, p]), left[:, a, p].copy(), right[:, a, p].copy())
            )
        candidates.sort(key=lambda s: -s.gain)
        return candidates


class Split:
    is_leaf = False

    def __init__(self, attribute, threshold, left, right, class_weights, kind="numeric"):
        self.attribute = int(attribute)
        self.threshold = threshold
        self.kind = kind
        self.left = left
        self.right = right
        self.class_weights = np.array(class_weights, dtype=float)

    @property
    def total_weight(self):
        return float(self.class_weights.sum())

    def goes_left(self, value) -> bool:
        if self.kind == "numeric":
            return value <= self.threshold
        return value == self.threshold

    def branch(self, x):
        return self.left if self.goes_left(x[self.attribute]) else self.right

    def left_mask(self, X):
        col = X[:, self.attribute]
        if self.kind == "numeric":
            return col <= self.threshold
        return col == self.threshold


class HoeffdingTree:
    """Hoeffding tree with adaptive Naive Bayes leaves.

    Parameters
    ----------
    n_classes, n_attributes : int
        Fixed sizes of the label and attribute spaces.
    delta : float
        Significance level of the Hoeffding bound.
    grace_period : int
        Weight a leaf must accumulate between split attempts.
    tie_threshold : float or None
        When set, split as soon as the bound drops below it even if the two
        best attributes are tied.
    nb_mode : {"product", "sum"}
        How per-attribute densities are combined in the leaf posterior.
    """

    def __init__(self, n_classes, n_attributes, delta=0.005615, grace_period=200,
                 tie_threshold=None, nb_mode="product", n_split_points=N_SPLIT_POINTS):
        if n_classes < 1 or n_attributes < 1:
            raise ValueError("n_classes and n_attributes must be positive")
        if not 0 < delta < 1:
            raise ValueError(f"delta must be in (0, 1), got {delta}")
        if nb_mode not in NB_MODES:
            raise ValueError(f"nb_mode must be one of {NB_MODES}, got {nb_mode!r}")
        if grace_period < 1:
            raise ValueError("grace_period must be >= 1")
        self.n_classes = int(n_classes)
        self.n_attributes = int(n_attributes)
        self.delta = float(delta)
        self.grace_period = grace_period
        self.tie_threshold = tie_threshold
        self.nb_mode = nb_mode
        self.n_split_points = n_split_points
        self.root = Leaf(self.n_classes, self.n_attributes)

    # -- structure -----------------------------------------------------

    def nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if not node.is_leaf:
                stack.append(node.right)
                stack.append(node.left)

    @property
    def n_nodes(self) -> int:
        return sum(1 for _ in self.nodes())

    @property
    def n_leaves(self) -> int:
        return sum(1 for n in self.nodes() if n.is_leaf)

    @property
    def depth(self) -> int:
        def _depth(node):
            return 0 if node.is_leaf else 1 + max(_depth(node.left), _depth(node.right))
        return _depth(self.root)

    def _check_instance(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_attributes,):
            raise ValueError(f"instance must have {self.n_attributes} attributes, got shape {x.shape}")
        return x

    def path(self, x):
        node = self.root
        out = [node]
        while not node.is_leaf:
            node = node.branch(x)
            out.append(node)
        return out

    def leaf_for(self, x) -> Leaf:
        node = self.root
        while not node.is_leaf:
            node = node.branch(x)
        return node

    def route(self, X):
        """Group row indices of ``X`` by the leaf they reach."""
        groups = []
        stack = [(self.root, np.arange(X.shape[0]))]
        while stack:
            node, idx = stack.pop()
            if idx.size == 0:
                continue
            if node.is_leaf:
                groups.append((node, idx))
                continue
            mask = node.left_mask(X[idx])
            stack.append((node.right, idx[~mask]))
            stack.append((node.left, idx[mask]))
        return groups

    # -- learning ------------------------------------------------------

    def learn_one(self, x, y, weight=1.0):
        x = self._check_instance(x)
        if not 0 <= y < self.n_classes:
            raise ValueError(f"class index {y} out of range for {self.n_classes} classes")
        path = self.path(x)
        for node in path[:-1]:
            node.class_weights[y] += weight
        leaf = path[-1]

        if leaf.total_weight > 0:
            if leaf.majority_class() == y:
                leaf.mc_correct += weight
            nb_class = int(np.argmax(leaf.likelihood(x, self.nb_mode)[0]))
            if nb_class == y:
                leaf.nb_correct += weight

        leaf.class_weights[y] += weight
        leaf.observer.update(x, y, weight)
        leaf.seen_since_attempt += weight

        if leaf.seen_since_attempt >= self.grace_period and leaf.n_observed_classes() >= 2:
            self._attempt_split(leaf, path[-2] if len(path) > 1 else None)
            leaf.seen_since_attempt = 0.0

    def _attempt_split(self, leaf, parent):
        candidates = leaf.candidate_splits(self.n_split_points)
        if len(candidates) < 2:
            return False
        best, second = candidates[0], candidates[1]
        if best.is_null or best.gain <= 0:
            return False
        eps = hoeffding_bound(math.log2(max(self.n_classes, 2)), self.delta, leaf.total_weight)
        if not (best.gain - second.gain > eps
                or (self.tie_threshold is not None and eps < self.tie_threshold)):
            return False
        split = Split(
            best.attribute, best.threshold,
            Leaf(self.n_classes, self.n_attributes, best.left),
            Leaf(self.n_classes, self.n_attributes, best.right),
            leaf.class_weights,
        )
        if parent is None:
            self.root = split
        elif parent.left is leaf:
            parent.left = split
        else:
            parent.right = split
        return True

    # -- inference -----------------------------------------------------

    def leaf_likelihood(self, x) -> np.ndarray:
        x = self._check_instance(x)
        return self.leaf_for(x).likelihood(x, self.nb_mode)[0]

    def classify_one(self, x):
        x = self._check_instance(x)
        leaf = self.leaf_for(x)
        proba = leaf.likelihood(x, self.nb_mode)[0]
        if leaf.uses_naive_bayes():
            return int(np.argmax(proba)), proba
        return leaf.majority_class(), proba

    def predict_proba(self, X) -> np.ndarray:
        X = self._check_batch(X)
        out = np.empty((X.shape[0], self.n_classes))
        for leaf, idx in self.route(X):
            out[idx] = leaf.likelihood(X[idx], self.nb_mode)
        return out

    def classify(self, X):
        """Vectorised ``classify_one``: returns ``(classes, probabilities)``."""
        X = self._check_batch(X)
        proba = np.empty((X.shape[0], self.n_classes))
        classes = np.empty(X.shape[0], dtype=int)
        for leaf, idx in self.route(X):
            p = leaf.likelihood(X[idx], self.nb_mode)
            proba[idx] = p
            classes[idx] = np.argmax(p, axis=1) if leaf.uses_naive_bayes() else leaf.majority_class()
        return classes, proba

    def _check_batch(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_attributes:
            raise ValueError(f"expected (n, {self.n_attributes}) instances, got shape {X.shape}")
        return X

    # -- serialisation -------------------------------------------------

    def to_dict(self):
        def node_dict(node):
            if node.is_leaf:
                return {
                    "type": "leaf",
                    "class_weights": node.class_weights.tolist(),
                    "seen_since_attempt": node.seen_since_attempt,
                    "nb_correct": node.nb_correct,
                    "mc_correct": node.mc_correct,
                    "observer": node.observer.to_dict(),
                }
            return {
                "type": "split",
                "attribute": node.attribute,
                "threshold": node.threshold,
                "kind": node.kind,
                "class_weights": node.class_weights.tolist(),
                "left": node_dict(node.left),
                "right": node_dict(node.right),
            }

        return {
            "n_classes": self.n_classes,
            "n_attributes": self.n_attributes,
            "delta": self.delta,
            "grace_period": self.grace_period,
            "tie_threshold": self.tie_threshold,
            "nb_mode": self.nb_mode,
            "n_split_points": self.n_split_points,
            "root": node_dict(self.root),
        }

    @classmethod
    def from_dict(cls, d):
        tree = cls(d["n_classes"], d["n_attributes"], d["delta"], d["grace_period"],
                   d["tie_threshold"], d["nb_mode"], d["n_split_points"])

        def build(nd):
            if nd["type"] == "leaf":
                leaf = Leaf(tree.n_classes, tree.n_attributes, nd["class_weights"])
                leaf.seen_since_attempt = nd["seen_since_attempt"]
                leaf.nb_correct = nd["nb_correct"]
                leaf.mc_correct = nd["mc_correct"]
                leaf.observer = GaussianObserver.from_dict(nd["observer"])
                return leaf
            if nd["type"] != "split":
                raise ValueError(f"unknown node type {nd['type']!r}")
            return Split(nd["attribute"], nd["threshold"], build(nd["left"]), build(nd["right"]),
                         nd["class_weights"], nd["kind"])

        tree.root = build(d["root"])
        return tree


def to_dot(tree: HoeffdingTree, window: int | None = None, class_names=None) -> str:
    """Graphviz DOT text for ``tree``.

    With ``window`` given, split attributes are decoded into the dimension
    and the step inside the instance window.
    """
    names = list(class_names) if class_names is not None else [str(i) for i in range(tree.n_classes)]
    lines = ["digraph HoeffdingTree {", '  node [shape=box, fontname="Helvetica"];']
    counter = [0]

    def fmt(v):
        return f"{v:.6g}"

    def visit(node):
        nid = counter[0]
        counter[0] += 1
        if node.is_leaf:
            hist = ", ".join(f"{names[c]}: {fmt(w)}" for c, w in enumerate(node.class_weights) if w > 0)
            label = f"class {names[node.majority_class()]}\\n[{hist}]"
            lines.append(f'  n{nid} [label="{label}", style=rounded];')
            return nid
        if window:
            d, t = divmod(node.attribute, window)
            subject = f"dim {d} @ step {t}"
        else:
            subject = f"x[{node.attribute}]"
        op = "≤" if node.kind == "numeric" else "="
        lines.append(f'  n{nid} [label="{subject} {op} {fmt(node.threshold)}"];')
        left = visit(node.left)
        lines.append(f'  n{nid} -> n{left} [label="yes"];')
        right = visit(node.right)
        lines.append(f'  n{nid} -> n{right} [label="no"];')
        return nid

    visit(tree.root)
    lines.append("}")
    return "\n".join(lines) + "\n"
