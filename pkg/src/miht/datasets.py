"""Variable-length multivariate time series and the UCR/UEA ``.ts`` format."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field

import numpy as np


class TSParseError(ValueError):
    """Raised when a ``.ts`` file is malformed."""

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


@dataclass
class MultivariateSeries:
    """One series of ``l`` time steps by ``m`` dimensions."""

    values: np.ndarray
    label: int | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError(f"series must be a non-empty (l, m) array, got shape {values.shape}")
        self.values = values

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def n_dims(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, MultivariateSeries):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.values, other.values)


@dataclass
class Dataset:
    series: list[MultivariateSeries]
    class_names: list[str]
    name: str = ""
    _dims: int | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.class_names)) != len(self.class_names):
            raise ValueError("class names must be unique")
        dims = {s.n_dims for s in self.series}
        if len(dims) > 1:
            raise ValueError(f"inconsistent dimension counts: {sorted(dims)}")
        for s in self.series:
            if s.label is not None and not 0 <= s.label < len(self.class_names):
                raise ValueError(f"label index {s.label} out of range")
        self._dims = dims.pop() if dims else None

    def __len__(self):
        return len(self.series)

    @property
    def n_dims(self) -> int | None:
        return self._dims

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def labels(self) -> np.ndarray:
        return np.array([-1 if s.label is None else s.label for s in self.series], dtype=int)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([s.length for s in self.series], dtype=int)

    def class_counts(self) -> np.ndarray:
        labels = self.labels
        return np.bincount(labels[labels >= 0], minlength=self.n_classes)

    def values(self) -> list[np.ndarray]:
        return [s.values for s in self.series]

    def label_names(self) -> list[str | None]:
        return [None if s.label is None else self.class_names[s.label] for s in self.series]


def _interpolate_missing(row, line_number):
    missing = np.isnan(row)
    if not missing.any():
        return row
    known = np.flatnonzero(~missing)
    if known.size == 0:
        raise TSParseError("dimension has no observed values to interpolate from", line_number)
    # np.interp holds the edge values constant outside the observed range
    row = row.copy()
    row[missing] = np.interp(np.flatnonzero(missing), known, row[known])
    return row


def _parse_values(token, line_number, impute):
    out = []
    for raw in token.split(","):
        raw = raw.strip()
        if raw == "?":
            if not impute:
                raise TSParseError("missing value '?' (enable impute to interpolate)", line_number)
            out.append(np.nan)
            continue
        try:
            out.append(float(raw))
        except ValueError:
            raise TSParseError(f"non-numeric token {raw!r}", line_number) from None
    row = np.array(out, dtype=float)
    if not impute and not np.all(np.isfinite(row)):
        raise TSParseError("non-finite value", line_number)
    return row


def parse_ts(stream, impute=False, name=None) -> Dataset:
    """Parse a ``.ts`` document from a text stream or string.

    Series keep their own lengths. With ``impute=True`` each ``?`` is
    replaced by linear interpolation along its dimension.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)

    header: dict[str, str] = {}
    class_names: list[str] | None = None
    has_labels = True
    in_data = False
    series = []
    n_dims = None

    for line_number, line in enumerate(stream, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if not in_data:
            if not line.startswith("@"):
                raise TSParseError("expected header line before @data", line_number)
            key, _, rest = line[1:].partition(" ")
            key = key.lower()
            rest = rest.strip()
            if key == "data":
                in_data = True
                if "dimensions" in header:
                    n_dims = int(header["dimensions"])
                elif header.get("univariate", "").lower() == "true":
                    n_dims = 1
            elif key == "classlabel":
                parts = rest.split()
                if not parts:
                    raise TSParseError("@classLabel needs true/false", line_number)
                has_labels = parts[0].lower() == "true"
                if has_labels:
                    class_names = parts[1:]
                    if not class_names:
                        raise TSParseError("@classLabel true with no labels", line_number)
                    if len(set(class_names)) != len(class_names):
                        raise TSParseError("duplicate class labels in header", line_number)
            elif key == "timestamps" and rest.lower() == "true":
                raise TSParseError("timestamped series are not supported", line_number)
            else:
                header[key] = rest
            continue

        fields = line.split(":")
        label = None
        if has_labels:
            *fields, raw_label = fields
            raw_label = raw_label.strip()
            if class_names is None:
                raise TSParseError("labelled data without @classLabel header", line_number)
            if raw_label not in class_names:
                raise TSParseError(f"unknown class label {raw_label!r}", line_number)
            label = class_names.index(raw_label)
        if not fields:
            raise TSParseError("no dimensions on data line", line_number)
        if n_dims is None:
            n_dims = len(fields)
        if len(fields) != n_dims:
            raise TSParseError(f"expected {n_dims} dimensions, found {len(fields)}", line_number)

        rows = [_parse_values(f, line_number, impute) for f in fields]
        lengths = {r.size for r in rows}
        if len(lengths) != 1:
            raise TSParseError(f"dimensions have different lengths {sorted(lengths)}", line_number)
        if impute:
            rows = [_interpolate_missing(r, line_number) for r in rows]
        series.append(MultivariateSeries(np.stack(rows, axis=1), label))

    if not in_data:
        raise TSParseError("missing @data section")
    return Dataset(series, list(class_names or []), name or header.get("problemname", ""))


def load_ts(path, impute=False) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        ds = parse_ts(fh, impute=impute)
    if not ds.name:
        ds.name = os.path.splitext(os.path.basename(path))[0]
    return ds


def write_ts(dataset: Dataset, stream=None) -> str | None:
    """Serialize ``dataset`` in ``.ts`` form. Returns the text if ``stream`` is None."""
    out = io.StringIO() if stream is None else stream
    lengths = set(dataset.lengths.tolist())
    labelled = bool(dataset.class_names) and all(s.label is not None for s in dataset.series)
    out.write(f"@problemName {dataset.name or 'unnamed'}\n")
    out.write("@timeStamps false\n@missing false\n")
    out.write(f"@univariate {'true' if dataset.n_dims == 1 else 'false'}\n")
    if dataset.n_dims is not None:
        out.write(f"@dimensions {dataset.n_dims}\n")
    out.write(f"@equalLength {'true' if len(lengths) == 1 else 'false'}\n")
    if len(lengths) == 1:
        out.write(f"@seriesLength {lengths.pop()}\n")
    if labelled:
        out.write("@classLabel true " + " ".join(dataset.class_names) + "\n")
    else:
        out.write("@classLabel false\n")
    out.write("@data\n")
    for s in dataset.series:
        dims = [",".join(repr(float(v)) for v in s.values[:, d]) for d in range(s.n_dims)]
        if labelled:
            dims.append(dataset.class_names[s.label])
        out.write(":".join(dims) + "\n")
    if stream is None:
        return out.getvalue()
    return None
