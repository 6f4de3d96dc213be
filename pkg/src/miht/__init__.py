"""Multi-instance Hoeffding tree classification of variable-length multivariate time series."""

from .bagging import Bag, ResolvedParams, build_bag, resolve_params
from .baselines import DTWNN, EuclideanNN, dtw_1nn, dtw_distance, euclidean_1nn
from .datasets import Dataset, MultivariateSeries, TSParseError, load_ts, parse_ts, write_ts
from .estimator import MIHTClassifier
from .hoeffding import HoeffdingTree, hoeffding_bound, info_gain, to_dot
from .metrics import EvalResult, evaluate, score_predictions
from .persistence import ModelFormatError, load_model, save_model
from .predictor import Explanation, PredictionReport, explain, predict
from .trainer import FitReport, TrainConfig, fit, select_tau

__version__ = "0.1.0"
