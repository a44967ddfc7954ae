"""Min-max normalization, one-hot binarization and MDL discretization.

All transforms are fitted on a training set and then applied unchanged to
other data. Fitted objects are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import UNSEEN, AttributeSpec, Dataset, DatasetSchema


@dataclass(frozen=True, eq=False)
class Normalizer:
    """Per-feature (min, max) observed on training data.

    Nominal features carry NaN bounds and pass through untouched.
    """

    schema: DatasetSchema
    mins: np.ndarray
    maxs: np.ndarray

    @property
    def ranges(self) -> np.ndarray:
        return self.maxs - self.mins

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.array(X, copy=True)
        for j, a in enumerate(self.schema.features):
            if a.is_nominal:
                continue
            lo, hi = self.mins[j], self.maxs[j]
            col = X[..., j]
            if hi > lo:
                scaled = np.clip((col - lo) / (hi - lo), 0.0, 1.0)
            else:
                scaled = np.zeros_like(col)
            out[..., j] = np.where(np.isnan(col), np.nan, scaled)
        return out


def fit_normalizer(train: Dataset) -> Normalizer:
    m = len(train.schema.features)
    mins = np.full(m, np.nan)
    maxs = np.full(m, np.nan)
    for j, a in enumerate(train.schema.features):
        if a.is_nominal:
            continue
        col = train.X[:, j]
        col = col[~np.isnan(col)]
        if col.size:
            mins[j], maxs[j] = col.min(), col.max()
        else:
            mins[j] = maxs[j] = 0.0
    return Normalizer(train.schema, mins, maxs)


def apply_normalizer(norm: Normalizer, inst: np.ndarray) -> np.ndarray:
    return norm.apply(inst)


@dataclass(frozen=True)
class Binarizer:
    """Layout of the distance space.

    Numeric features map to one dimension each; nominal feature ``j`` maps to
    a block of ``n_j`` indicator dimensions. ``columns[j]`` is the first output
    dimension of feature ``j``.
    """

    schema: DatasetSchema
    columns: tuple[int, ...]
    width: int

    @classmethod
    def from_schema(cls, schema: DatasetSchema) -> "Binarizer":
        cols, pos = [], 0
        for a in schema.features:
            cols.append(pos)
            pos += a.cardinality if a.is_nominal else 1
        return cls(schema, tuple(cols), pos)

    @property
    def numeric_dims(self) -> np.ndarray:
        return np.array([c for c, a in zip(self.columns, self.schema.features) if not a.is_nominal],
                        dtype=np.int64)

    @property
    def blocks(self) -> list[tuple[int, int]]:
        """(start, width) of each nominal block, in feature order."""
        return [(c, a.cardinality) for c, a in zip(self.columns, self.schema.features) if a.is_nominal]

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        out = np.zeros((X.shape[0], self.width))
        for j, (c, a) in enumerate(zip(self.columns, self.schema.features)):
            col = X[:, j]
            if not a.is_nominal:
                out[:, c] = col
                continue
            miss = np.isnan(col)
            out[miss, c:c + a.cardinality] = np.nan
            seen = ~miss & (col != UNSEEN)
            rows = np.flatnonzero(seen)
            out[rows, c + col[seen].astype(np.int64)] = 1.0
        return out[0] if single else out


def binarize(binz: Binarizer, inst: np.ndarray) -> np.ndarray:
    return binz.apply(inst)


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    if total <= 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def mdl_accepts(parent: np.ndarray, left: np.ndarray, right: np.ndarray) -> tuple[bool, float]:
    """MDL stopping test for one binary split, given per-class counts.

    Returns (accepted, information gain).
    """
    N = parent.sum()
    ent, ent1, ent2 = _entropy(parent), _entropy(left), _entropy(right)
    gain = ent - (left.sum() / N) * ent1 - (right.sum() / N) * ent2
    c, c1, c2 = (int((x > 0).sum()) for x in (parent, left, right))
    delta = math.log2(3 ** c - 2) - (c * ent - c1 * ent1 - c2 * ent2)
    threshold = (math.log2(N - 1) + delta) / N
    return gain > threshold, gain


_TIE = 1e-12


def _split(values: np.ndarray, labels: np.ndarray, n_classes: int, out: list[float]) -> None:
    N = values.size
    if N < 2:
        return
    uniq, inverse = np.unique(values, return_inverse=True)
    if uniq.size < 2:
        return
    group = np.zeros((uniq.size, n_classes))
    np.add.at(group, (inverse, labels), 1.0)
    parent = group.sum(axis=0)
    cum = np.cumsum(group, axis=0)

    best = None
    for g in range(uniq.size - 1):
        a, b = group[g], group[g + 1]
        pure_same = (a > 0).sum() == 1 and (b > 0).sum() == 1 and a.argmax() == b.argmax()
        if pure_same:
            continue
        left = cum[g]
        right = parent - left
        n1 = left.sum()
        e = (n1 / N) * _entropy(left) + ((N - n1) / N) * _entropy(right)
        if best is None or e < best[0] - _TIE:
            best = (e, g, left, right)
    if best is None:
        return
    _, g, left, right = best
    ok, _ = mdl_accepts(parent, left, right)
    if not ok:
        return
    cut = (uniq[g] + uniq[g + 1]) / 2.0
    below = values <= cut
    _split(values[below], labels[below], n_classes, out)
    out.append(float(cut))
    _split(values[~below], labels[~below], n_classes, out)


def mdl_cut_points(values: np.ndarray, labels: np.ndarray, n_classes: int) -> list[float]:
    """Recursive entropy/MDL cut points for one numeric column (NaNs dropped)."""
    values = np.asarray(values, dtype=float)
    labels = np.asarray(labels, dtype=np.int64)
    keep = ~np.isnan(values)
    out: list[float] = []
    _split(values[keep], labels[keep], n_classes, out)
    return sorted(out)


def _interval_label(cuts: list[float], i: int) -> str:
    lo = "-inf" if i == 0 else repr(cuts[i - 1])
    hi = "inf" if i == len(cuts) else repr(cuts[i])
    close = ")" if i == len(cuts) else "]"
    return f"({lo}..{hi}{close}"


@dataclass(frozen=True)
class Discretizer:
    """Per-feature sorted cut points; ``cuts[j]`` is empty for nominal features."""

    schema: DatasetSchema
    cuts: tuple[tuple[float, ...], ...]

    @property
    def output_schema(self) -> DatasetSchema:
        feats = []
        for a, cuts in zip(self.schema.features, self.cuts):
            if a.is_nominal:
                feats.append(a)
            else:
                labels = [_interval_label(list(cuts), i) for i in range(len(cuts) + 1)]
                feats.append(AttributeSpec.nominal(a.name, labels))
        return self.schema.with_features(feats)

    def apply_matrix(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.array(X, copy=True)
        for j, a in enumerate(self.schema.features):
            if a.is_nominal:
                continue
            col = X[..., j]
            idx = np.searchsorted(np.asarray(self.cuts[j]), col, side="left").astype(float)
            out[..., j] = np.where(np.isnan(col), np.nan, idx)
        return out

    def apply(self, d: Dataset) -> Dataset:
        return Dataset(self.output_schema, self.apply_matrix(d.X), d.y)


def fit_discretizer(train: Dataset) -> Discretizer:
    cuts = []
    for j, a in enumerate(train.schema.features):
        if a.is_nominal:
            cuts.append(())
        else:
            cuts.append(tuple(mdl_cut_points(train.X[:, j], train.y, train.schema.n_classes)))
    return Discretizer(train.schema, tuple(cuts))


def apply_discretizer(disc: Discretizer, inst: np.ndarray) -> np.ndarray:
    return disc.apply_matrix(inst)
