"""Synthetic series with a known class-carrying segment."""

from __future__ import annotations

import numpy as np

from .datasets import Dataset, MultivariateSeries


def planted_concept(n_series=200, length=100, n_dims=2, segment=(40, 60), shift=3.0,
                    noise=1.0, seed=0) -> Dataset:
    """Two-class Gaussian noise with a mean shift inside ``segment``.

    Class 0 is shifted by ``-shift * noise`` and class 1 by ``+shift * noise``
    on every dimension of the segment; elsewhere both classes are identical
    white noise. Labels alternate so the classes stay balanced.
    """
    rng = np.random.default_rng(seed)
    lo, hi = segment
    series = []
    for i in range(n_series):
        label = i % 2
        values = rng.normal(0.0, noise, size=(length, n_dims))
        values[lo:hi] += (1 if label else -1) * shift * noise
        series.append(MultivariateSeries(values, label))
    return Dataset(series, ["0", "1"], name="PlantedConcept")
