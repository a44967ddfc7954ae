"""Euclidean distance in the normalized, binarized space and exact kNN search."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .preprocess import Binarizer

# squared contribution of a missing cell: numeric range is [0, 1], a one-hot
# mismatch contributes 1 + 1
MISSING_NUMERIC = 1.0
MISSING_NOMINAL = 2.0


@dataclass(frozen=True, eq=False)
class NeighborSet:
    """Retained neighbors in ascending distance order.

    Every training instance with distance <= ``bandwidth`` is included, so
    ``len(indices)`` (the count r) can exceed the requested k under ties.
    """

    indices: np.ndarray
    distances: np.ndarray

    @property
    def bandwidth(self) -> float:
        return float(self.distances[-1])

    def __len__(self) -> int:
        return self.indices.size


def squared_distances(train: np.ndarray, query: np.ndarray, layout: Binarizer | None = None) -> np.ndarray:
    """Squared distances from ``query`` to every row of ``train``.

    Without a ``layout`` every dimension is treated as numeric. With one, a
    nominal block where either side is missing contributes 2 as a whole.
    """
    train = np.atleast_2d(np.asarray(train, dtype=float))
    query = np.asarray(query, dtype=float)
    if query.shape[-1] != train.shape[1]:
        raise ValueError(f"dimension mismatch: {query.shape[-1]} vs {train.shape[1]}")
    sq = (train - query) ** 2
    if layout is None:
        return np.where(np.isnan(sq), MISSING_NUMERIC, sq).sum(axis=1)

    total = np.zeros(train.shape[0])
    num = layout.numeric_dims
    if num.size:
        part = sq[:, num]
        total += np.where(np.isnan(part), MISSING_NUMERIC, part).sum(axis=1)
    for start, width in layout.blocks:
        part = sq[:, start:start + width]
        miss = np.isnan(part).any(axis=1)
        total += np.where(miss, MISSING_NOMINAL, np.nan_to_num(part).sum(axis=1))
    return total


def distance(a: np.ndarray, b: np.ndarray, layout: Binarizer | None = None) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(squared_distances(a[None, :], b, layout)[0]))


def k_nearest(train: np.ndarray, query: np.ndarray, k: int, layout: Binarizer | None = None) -> NeighborSet:
    """Exact k nearest neighbors by linear scan, ties at the k-th distance kept."""
    n = np.atleast_2d(train).shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    d = np.sqrt(squared_distances(train, query, layout))
    if k < n:
        d_k = np.partition(d, k - 1)[k - 1]
        idx = np.flatnonzero(d <= d_k)
    else:
        idx = np.arange(n)
    # stable sort keeps ties in training order
    order = np.argsort(d[idx], kind="stable")
    idx = idx[order]
    return NeighborSet(idx, d[idx])
