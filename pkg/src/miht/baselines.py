"""One-nearest-neighbour reference classifiers."""

from __future__ import annotations

import numpy as np
from numba import njit
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .validation import check_series_labels, check_series_list


@njit(cache=True)
def _dtw(a, b):
    la, lb = a.shape[0], b.shape[0]
    prev = np.full(lb + 1, np.inf)
    curr = np.empty(lb + 1)
    prev[0] = 0.0
    for i in range(la):
        curr[0] = np.inf
        for j in range(lb):
            cost = 0.0
            for d in range(a.shape[1]):
                diff = a[i, d] - b[j, d]
                cost += diff * diff
            best = prev[j]
            if prev[j + 1] < best:
                best = prev[j + 1]
            if curr[j] < best:
                best = curr[j]
            curr[j + 1] = cost + best
        prev, curr = curr, prev
    return prev[lb]


def dtw_distance(a, b) -> float:
    """Dependent multivariate DTW, no warping window.

    The local cost is the squared Euclidean distance across all dimensions
    and the accumulated cost is returned without a square root.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    return float(_dtw(np.ascontiguousarray(a), np.ascontiguousarray(b)))


def _nearest(distances):
    # argmin keeps the first occurrence on ties
    return int(np.argmin(distances))


class EuclideanNN(ClassifierMixin, BaseEstimator):
    """1-NN under flat Euclidean distance.

    Variable-length series are truncated to the shortest length seen in the
    training and query sets combined.
    """

    def fit(self, X, y=None):
        series, y = check_series_labels(X, y)
        self.series_ = series
        self.y_ = y
        self.classes_ = np.unique(y)
        self.min_length_ = min(s.shape[0] for s in series)
        self.n_dims_ = series[0].shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "series_")
        query = check_series_list(X, self.n_dims_)
        cut = min(self.min_length_, min(s.shape[0] for s in query))
        train = np.stack([s[:cut].ravel() for s in self.series_])
        test = np.stack([s[:cut].ravel() for s in query])
        out = [_nearest(((train - t) ** 2).sum(axis=1)) for t in test]
        return self.y_[out]


class DTWNN(ClassifierMixin, BaseEstimator):
    """1-NN under :func:`dtw_distance` on untruncated series."""

    def fit(self, X, y=None):
        series, y = check_series_labels(X, y)
        self.series_ = [np.ascontiguousarray(s) for s in series]
        self.y_ = y
        self.classes_ = np.unique(y)
        self.n_dims_ = series[0].shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "series_")
        query = check_series_list(X, self.n_dims_)
        out = []
        for q in query:
            q = np.ascontiguousarray(q)
            out.append(_nearest([_dtw(q, s) for s in self.series_]))
        return self.y_[out]


def euclidean_1nn(train, test) -> np.ndarray:
    """Predicted label indices for ``test`` from 1-NN Euclidean on ``train`` (Datasets)."""
    if len(train) == 0:
        raise ValueError("training set is empty")
    return EuclideanNN().fit(train.values(), train.labels).predict(test.values())


def dtw_1nn(train, test) -> np.ndarray:
    if len(train) == 0:
        raise ValueError("training set is empty")
    return DTWNN().fit(train.values(), train.labels).predict(test.values())
