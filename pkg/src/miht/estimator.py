from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from . import predictor
from .datasets import Dataset, MultivariateSeries
from .hoeffding import to_dot
from .trainer import TrainConfig, fit
from .validation import check_series_labels, check_series_list


class MIHTClassifier(ClassifierMixin, BaseEstimator):
    """Multi-instance Hoeffding tree classifier for variable-length series.

    Each series becomes a bag of sliding windows; a Hoeffding tree is
    trained on the windows and then repeatedly reinforced with the ``k``
    consecutive windows of each bag most likely under the bag's label.
    A series is labelled by the most frequent window prediction.

    Parameters
    ----------
    window : float, default=0.21
        Window width as a fraction of the mean training length.
    stride : float, default=0.02
        Step between window starts as a fraction of the mean training length.
    k : int, default=4
        Number of consecutive windows selected per bag.
    grace_period : float, default=3.665
        Weight a leaf must see between split attempts, as a multiple of the
        mean bag size.
    delta : float, default=0.005615
        Significance level of the Hoeffding bound.
    max_iter : int, default=100
        Cap on reinforcement iterations.
    nb_mode : {"product", "sum"}, default="product"
        How per-attribute densities combine in the leaf posterior.
    tie_threshold : float or None, default=None
        Split once the Hoeffding bound falls below this value even when the
        best attributes are tied. Off by default.
    random_state : int or None
        Recorded for reproducibility; training itself has no random step.

    Attributes
    ----------
    classes_ : ndarray
    tree_ : HoeffdingTree
    params_ : ResolvedParams
    fit_report_ : FitReport
    n_dims_ : int
    """

    def __init__(self, window=0.21, stride=0.02, k=4, grace_period=3.665, delta=0.005615,
                 max_iter=100, nb_mode="product", tie_threshold=None, random_state=None):
        self.window = window
        self.stride = stride
        self.k = k
        self.grace_period = grace_period
        self.delta = delta
        self.max_iter = max_iter
        self.nb_mode = nb_mode
        self.tie_threshold = tie_threshold
        self.random_state = random_state

    def _config(self):
        return TrainConfig(
            window=self.window, stride=self.stride, k=self.k, grace_period=self.grace_period,
            delta=self.delta, max_iterations=self.max_iter,
            seed=0 if self.random_state is None else int(self.random_state),
            nb_mode=self.nb_mode, tie_threshold=self.tie_threshold,
        )

    def fit(self, X, y=None):
        series, y = check_series_labels(X, y)
        self.classes_, codes = np.unique(y, return_inverse=True)
        train = Dataset(
            [MultivariateSeries(s, int(c)) for s, c in zip(series, codes)],
            [str(c) for c in self.classes_],
        )
        self.tree_, self.params_, self.fit_report_ = fit(train, self._config())
        self.n_dims_ = series[0].shape[1]
        return self

    def predict_reports(self, X) -> list[predictor.PredictionReport]:
        check_is_fitted(self, "tree_")
        series = check_series_list(X, self.n_dims_)
        return [predictor.predict(self.tree_, self.params_, s) for s in series]

    def predict(self, X):
        check_is_fitted(self, "tree_")
        return self.classes_[[r.predicted for r in self.predict_reports(X)]]

    def predict_proba(self, X):
        """Share of each bag's windows voting for every class."""
        out = []
        for r in self.predict_reports(X):
            out.append(np.bincount(r.instance_classes, minlength=len(self.classes_)) / len(r))
        return np.vstack(out)

    def explain(self, X) -> list[predictor.Explanation]:
        check_is_fitted(self, "tree_")
        series = check_series_list(X, self.n_dims_)
        return [predictor.explain(self.tree_, self.params_, s) for s in series]

    def to_dot(self) -> str:
        check_is_fitted(self, "tree_")
        return to_dot(self.tree_, self.params_.window, [str(c) for c in self.classes_])
