"""Data model, CSV ingestion and stratified fold generation.

Instances are stored as rows of a float matrix: numeric attributes hold their
value, nominal attributes hold the index of their value in the schema's value
list, and ``NaN`` marks a missing cell. A nominal value that is not part of the
schema (only possible when reading data against an existing schema) is encoded
as :data:`UNSEEN`.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

MISSING = math.nan
UNSEEN = -1.0

NOMINAL = "nominal"
NUMERIC = "numeric"


class DatasetError(ValueError):
    """Base class for problems with dataset contents."""


class EmptyFileError(DatasetError):
    pass


class ArityError(DatasetError):
    def __init__(self, row: int, expected: int, got: int):
        super().__init__(f"row {row}: expected {expected} cells, got {got}")
        self.row = row


class NumericParseError(DatasetError):
    def __init__(self, row: int, column: str, cell: str):
        super().__init__(f"row {row}, column {column!r}: cannot parse {cell!r} as a number")
        self.row = row
        self.column = column


class MissingClassError(DatasetError):
    def __init__(self, row: int, column: str):
        super().__init__(f"row {row}: class column {column!r} is missing")
        self.row = row
        self.column = column


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    kind: str
    values: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind == NOMINAL:
            if not self.values:
                raise DatasetError(f"nominal attribute {self.name!r} has no values")
            if len(set(self.values)) != len(self.values):
                raise DatasetError(f"nominal attribute {self.name!r} has duplicate values")
        elif self.kind == NUMERIC:
            if self.values:
                raise DatasetError(f"numeric attribute {self.name!r} cannot declare values")
        else:
            raise DatasetError(f"unknown attribute kind {self.kind!r}")

    @classmethod
    def nominal(cls, name: str, values: Iterable[str]) -> "AttributeSpec":
        return cls(name, NOMINAL, tuple(values))

    @classmethod
    def numeric(cls, name: str) -> "AttributeSpec":
        return cls(name, NUMERIC)

    @property
    def is_nominal(self) -> bool:
        return self.kind == NOMINAL

    @property
    def cardinality(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class DatasetSchema:
    """Ordered attributes plus the position of the class attribute.

    ``features`` lists the predictive attributes in column order with the
    class attribute removed; feature matrices follow that order.
    """

    attributes: tuple[AttributeSpec, ...]
    class_index: int

    def __post_init__(self):
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise DatasetError("attribute names must be unique")
        if not 0 <= self.class_index < len(self.attributes):
            raise DatasetError("class_index out of range")
        if not self.attributes[self.class_index].is_nominal:
            raise DatasetError("class attribute must be nominal")

    @property
    def class_attribute(self) -> AttributeSpec:
        return self.attributes[self.class_index]

    @property
    def classes(self) -> tuple[str, ...]:
        return self.class_attribute.values

    @property
    def n_classes(self) -> int:
        return self.class_attribute.cardinality

    @property
    def features(self) -> tuple[AttributeSpec, ...]:
        return tuple(a for i, a in enumerate(self.attributes) if i != self.class_index)

    def with_features(self, features: Sequence[AttributeSpec]) -> "DatasetSchema":
        """Same class attribute and position, new predictive attributes."""
        attrs = list(features)
        attrs.insert(self.class_index, self.class_attribute)
        return DatasetSchema(tuple(attrs), self.class_index)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable collection of instances conforming to a schema.

    X : (n, m) float array over ``schema.features``; NaN marks MISSING.
    y : (n,) int array of class indices.
    """

    schema: DatasetSchema
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=float, copy=True)
        y = np.array(self.y, dtype=np.int64, copy=True)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise DatasetError("X must be (n, m) and y (n,)")
        feats = self.schema.features
        if X.shape[1] != len(feats):
            raise DatasetError(f"X has {X.shape[1]} columns, schema has {len(feats)} features")
        if y.size and (y.min() < 0 or y.max() >= self.schema.n_classes):
            raise DatasetError("class index out of range")
        for j, a in enumerate(feats):
            if not a.is_nominal:
                continue
            col = X[:, j]
            col = col[~np.isnan(col)]
            bad = (col != UNSEEN) & ((col != np.round(col)) | (col < 0) | (col >= a.cardinality))
            if bad.any():
                raise DatasetError(f"attribute {a.name!r}: value index out of range")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.X.shape[0]

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        return Dataset(self.schema, self.X[idx], self.y[idx])

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.schema.n_classes)


@dataclass
class CsvConfig:
    """How to interpret a CSV file.

    class_column: header name of the class column; ``None`` means the last column.
    kinds: per-column overrides, ``"nominal"`` or ``"numeric"``. Other columns are
    numeric iff every non-missing cell parses as a float.
    """

    class_column: str | None = None
    missing: str = "?"
    kinds: Mapping[str, str] = field(default_factory=dict)


def _parse_float(cell: str) -> float | None:
    try:
        v = float(cell)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def load_csv(source: TextIO | bytes | str, config: CsvConfig | None = None,
             schema: DatasetSchema | None = None) -> Dataset:
    """Read a headed CSV into a :class:`Dataset`.

    ``source`` may be a text stream, raw bytes (decoded as UTF-8) or a string
    holding the file contents. When ``schema`` is given, cells are encoded
    against it instead of inferring one; unknown nominal values become
    :data:`UNSEEN` (unknown class labels are an error).
    """
    config = config or CsvConfig()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        source = io.StringIO(source)
    rows = [r for r in csv.reader(source) if r]
    if not rows:
        raise EmptyFileError("empty file: no header row")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise EmptyFileError("empty file: no data rows")
    width = len(header)
    for i, r in enumerate(body, start=1):
        if len(r) != width:
            raise ArityError(i, width, len(r))
    body = [[c.strip() for c in r] for r in body]

    class_name = config.class_column if config.class_column is not None else header[-1]
    if class_name not in header:
        raise DatasetError(f"class column {class_name!r} not in header")
    ci = header.index(class_name)
    for i, r in enumerate(body, start=1):
        if r[ci] == config.missing or r[ci] == "":
            raise MissingClassError(i, class_name)

    if schema is None:
        schema = _infer_schema(header, body, ci, config)
    elif [a.name for a in schema.attributes] != header or schema.class_index != ci:
        raise DatasetError("CSV header does not match the given schema")

    feats = schema.features
    cols = [j for j in range(width) if j != ci]
    lookup = [{v: float(k) for k, v in enumerate(a.values)} for a in feats]
    classes = {v: k for k, v in enumerate(schema.classes)}
    X = np.empty((len(body), len(feats)))
    y = np.empty(len(body), dtype=np.int64)
    for i, r in enumerate(body):
        for out, (j, a) in enumerate(zip(cols, feats)):
            cell = r[j]
            if cell == config.missing or cell == "":
                X[i, out] = MISSING
            elif a.is_nominal:
                X[i, out] = lookup[out].get(cell, UNSEEN)
            else:
                v = _parse_float(cell)
                if v is None:
                    raise NumericParseError(i + 1, a.name, cell)
                X[i, out] = v
        if r[ci] not in classes:
            raise DatasetError(f"row {i + 1}: unknown class label {r[ci]!r}")
        y[i] = classes[r[ci]]
    return Dataset(schema, X, y)


def _infer_schema(header, body, ci, config) -> DatasetSchema:
    attrs = []
    for j, name in enumerate(header):
        cells = [r[j] for r in body if r[j] != config.missing and r[j] != ""]
        kind = config.kinds.get(name)
        if j == ci:
            kind = NOMINAL
        elif kind is None:
            kind = NUMERIC if all(_parse_float(c) is not None for c in cells) else NOMINAL
        if kind == NOMINAL:
            attrs.append(AttributeSpec.nominal(name, dict.fromkeys(cells)))
        elif kind == NUMERIC:
            for i, r in enumerate(body, start=1):
                c = r[j]
                if c != config.missing and c != "" and _parse_float(c) is None:
                    raise NumericParseError(i, name, c)
            attrs.append(AttributeSpec.numeric(name))
        else:
            raise DatasetError(f"unknown kind override {kind!r} for column {name!r}")
    return DatasetSchema(tuple(attrs), ci)


def format_cell(attr: AttributeSpec, v: float, missing: str = "?") -> str:
    if math.isnan(v):
        return missing
    if attr.is_nominal:
        if v == UNSEEN:
            return missing
        return attr.values[int(v)]
    return repr(float(v))


def write_csv(d: Dataset, stream: TextIO, missing: str = "?") -> None:
    """Write ``d`` back out; floats use ``repr`` so values round-trip exactly."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow([a.name for a in d.schema.attributes])
    feats = d.schema.features
    ci = d.schema.class_index
    for row, label in zip(d.X, d.y):
        cells = [format_cell(a, v, missing) for a, v in zip(feats, row)]
        cells.insert(ci, d.schema.classes[label])
        w.writerow(cells)


def stratified_folds(d: Dataset, folds: int, seed: int | Sequence[int]) -> list[tuple[np.ndarray, np.ndarray]]:
    """Stratified partition into ``folds`` (train, test) index pairs.

    Members of each class are shuffled and dealt round-robin to the folds. The
    deal continues across classes from where the previous class stopped, so fold
    sizes stay balanced overall as well as per class.
    """
    n = len(d)
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if folds > n:
        raise ValueError(f"folds ({folds}) exceeds instance count ({n})")
    rng = np.random.default_rng(seed)
    assign = np.empty(n, dtype=np.int64)
    start = 0
    for c in range(d.schema.n_classes):
        members = np.flatnonzero(d.y == c)
        members = members[rng.permutation(members.size)]
        assign[members] = (start + np.arange(members.size)) % folds
        start = (start + members.size) % folds
    everything = np.arange(n)
    return [(everything[assign != f], everything[assign == f]) for f in range(folds)]
