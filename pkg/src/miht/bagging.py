"""Sliding-window bags of instances.

An instance is one window of ``window`` steps over all ``m`` dimensions,
flattened dimension-major: attribute ``a = d * window + t`` holds dimension
``d`` at offset ``t`` inside the window. The explainer and the DOT export
rely on that layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ResolvedParams:
    """Window width, stride, consecutive-instance count and grace period in steps."""

    window: int
    stride: int
    k: int
    grace_period: int

    def __post_init__(self):
        if self.window < 2:
            raise ValueError(f"window must be >= 2, got {self.window}")
        if not 1 <= self.stride <= self.window:
            raise ValueError(f"stride must be in [1, window], got {self.stride}")
        if self.k < 1 or self.grace_period < 1:
            raise ValueError("k and grace_period must be >= 1")

    def n_attributes(self, n_dims: int) -> int:
        return n_dims * self.window

    def bag_size(self, length: int) -> int:
        if length < self.window:
            return 1
        return (length - self.window) // self.stride + 1

    def attribute_position(self, attribute: int) -> tuple[int, int]:
        """Map an attribute index back to ``(dimension, offset within window)``."""
        return divmod(int(attribute), self.window)

    def instance_span(self, index: int, length: int | None = None) -> tuple[int, int]:
        start = index * self.stride
        end = start + self.window
        if length is not None:
            end = min(end, length)
        return start, end


@dataclass
class Bag:
    instances: np.ndarray  # (n_instances, m * window)
    label: int | None
    source_length: int

    def __len__(self):
        return self.instances.shape[0]


def resolve_params(lengths, window_frac, stride_frac, k, grace_frac) -> ResolvedParams:
    """Turn length fractions into step counts using the mean training length."""
    lengths = np.asarray(lengths, dtype=float)
    if lengths.size == 0:
        raise ValueError("cannot resolve window parameters on an empty training set")
    if not (0 < window_frac <= 1 and 0 < stride_frac <= 1):
        raise ValueError("window and stride fractions must be in (0, 1]")
    if grace_frac <= 0:
        raise ValueError("grace period fraction must be positive")
    if k < 1:
        raise ValueError("k must be >= 1")
    mean_len = float(lengths.mean())
    if mean_len < 2:
        raise ValueError(f"mean series length {mean_len:.3g} is below 2; no window fits")

    window = max(2, int(round(window_frac * mean_len)))
    stride = min(max(int(round(stride_frac * mean_len)), 1), window)
    if mean_len >= window:
        mean_bag = int(np.floor((mean_len - window) / stride)) + 1
    else:
        mean_bag = 1
    grace = max(1, int(round(grace_frac * mean_bag)))
    return ResolvedParams(window=window, stride=stride, k=int(k), grace_period=grace)


def window_starts(length: int, params: ResolvedParams) -> np.ndarray:
    if length < params.window:
        return np.zeros(1, dtype=int)
    return np.arange(0, length - params.window + 1, params.stride)


def build_bag(values, params: ResolvedParams, label=None) -> Bag:
    """Cut one ``(l, m)`` series into its bag of windows.

    Series shorter than the window yield a single instance padded by
    repeating the last time step.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    length = values.shape[0]
    w = params.window
    if length < w:
        pad = np.repeat(values[-1:], w - length, axis=0)
        values = np.concatenate([values, pad], axis=0)
    starts = window_starts(length, params)
    # (n_inst, w, m) -> (n_inst, m, w) -> dimension-major flattening
    idx = starts[:, None] + np.arange(w)[None, :]
    windows = values[idx].transpose(0, 2, 1).reshape(len(starts), -1)
    return Bag(np.ascontiguousarray(windows), label, length)
