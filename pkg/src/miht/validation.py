"""Input checks shared by the estimators."""

from __future__ import annotations

import numpy as np

from .datasets import Dataset


def check_series_list(X, n_dims=None) -> list[np.ndarray]:
    """Coerce ``X`` to a list of finite ``(l, m)`` float arrays.

    Accepts a :class:`Dataset`, a 3-D array shaped ``(n, l, m)``, a 2-D array
    of univariate series ``(n, l)``, or any sequence of 1-D / 2-D arrays.
    """
    if isinstance(X, Dataset):
        series = X.values()
    elif isinstance(X, np.ndarray) and X.dtype != object:
        if X.ndim == 3:
            series = list(X)
        elif X.ndim == 2:
            series = [row[:, None] for row in X]
        else:
            raise ValueError(f"expected a 2-D or 3-D array of series, got {X.ndim}-D")
    else:
        series = list(X)
    if not series:
        raise ValueError("no series given")

    out = []
    for i, s in enumerate(series):
        s = np.asarray(s, dtype=float)
        if s.ndim == 1:
            s = s[:, None]
        if s.ndim != 2 or s.shape[0] < 1 or s.shape[1] < 1:
            raise ValueError(f"series {i} must be a non-empty (l, m) array, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError(f"series {i} contains NaN or infinite values")
        out.append(s)

    dims = {s.shape[1] for s in out}
    if len(dims) != 1:
        raise ValueError(f"series disagree on the number of dimensions: {sorted(dims)}")
    if n_dims is not None and dims != {n_dims}:
        raise ValueError(f"expected series with {n_dims} dimensions, got {dims.pop()}")
    return out


def check_series_labels(X, y):
    series = check_series_list(X)
    if isinstance(X, Dataset) and y is None:
        y = X.label_names()
    y = np.asarray(y)
    if y.ndim != 1 or y.shape[0] != len(series):
        raise ValueError(f"y must be 1-D with {len(series)} labels, got shape {y.shape}")
    return series, y
