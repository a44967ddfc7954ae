"""Kernel weights from distance ratios, and rescaling of the total weight."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .neighbors import NeighborSet

Kernel = Callable[[np.ndarray], np.ndarray]


def linear_kernel(y):
    """1 - y on [0, 1), zero from 1 onwards. Accepts scalars or arrays."""
    y = np.asarray(y, dtype=float)
    if (y < 0).any():
        raise ValueError("kernel argument must be non-negative")
    w = np.where(y < 1.0, 1.0 - y, 0.0)
    return float(w) if w.ndim == 0 else w


def constant_kernel(y):
    """Weight 1 everywhere. Turns LWNB with k = n into plain naive Bayes."""
    y = np.asarray(y, dtype=float)
    return np.ones_like(y) if y.ndim else 1.0


def compute_weights(nbrs: NeighborSet | np.ndarray, kernel: Kernel = linear_kernel) -> np.ndarray:
    """Raw weights ``kernel(d_i / d_k)`` for each retained neighbor.

    When every retained neighbor ends up with weight zero (all coincide with
    the query, or all sit exactly at the bandwidth), each gets weight 1.
    """
    d = nbrs.distances if isinstance(nbrs, NeighborSet) else np.asarray(nbrs, dtype=float)
    if d.size == 0:
        raise ValueError("empty neighbor set")
    d_k = d[-1] if isinstance(nbrs, NeighborSet) else d.max()
    if d_k == 0:
        return np.ones_like(d)
    w = np.asarray(kernel(d / d_k), dtype=float)
    if not w.any():
        return np.ones_like(d)
    return w


def rescale_weights(raw: np.ndarray, r: int) -> np.ndarray:
    """Scale ``raw`` so the weights sum to ``r``."""
    raw = np.asarray(raw, dtype=float)
    total = raw.sum()
    if not total > 0:
        raise ValueError("cannot rescale weights that sum to zero")
    return raw * r / total
