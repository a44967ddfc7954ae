"""Synthetic benchmark datasets: two nested spheres and a checkers board."""

from __future__ import annotations

import numpy as np

from .dataset import AttributeSpec, Dataset, DatasetSchema

INNER_RADIUS = 0.5
OUTER_RADIUS = 1.0
SQUARE = 0.125

SPHERES_SCHEMA = DatasetSchema(
    (AttributeSpec.numeric("x"), AttributeSpec.numeric("y"), AttributeSpec.numeric("z"),
     AttributeSpec.nominal("class", ["inner", "outer"])),
    class_index=3,
)
CHECKERS_SCHEMA = DatasetSchema(
    (AttributeSpec.numeric("x"), AttributeSpec.numeric("y"),
     AttributeSpec.nominal("class", ["black", "white"])),
    class_index=2,
)


def _in_shell(rng: np.random.Generator, n: int, r_lo: float, r_hi: float) -> np.ndarray:
    """Uniform-in-volume points with r_lo < |x| <= r_hi (r_lo = 0 gives a ball)."""
    v = rng.standard_normal((n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    u = 1.0 - rng.random(n)  # (0, 1]
    r = (r_lo ** 3 + u * (r_hi ** 3 - r_lo ** 3)) ** (1.0 / 3.0)
    return v * r[:, None]


def sphere_label(points: np.ndarray) -> np.ndarray:
    return (np.linalg.norm(points, axis=1) > INNER_RADIUS).astype(np.int64)


def gen_two_spheres(n_per_class: int = 500, seed: int = 0) -> Dataset:
    """Class "inner": solid ball of radius 0.5. Class "outer": the shell out to radius 1."""
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    rng = np.random.default_rng(seed)
    inner = _in_shell(rng, n_per_class, 0.0, INNER_RADIUS)
    outer = _in_shell(rng, n_per_class, INNER_RADIUS, OUTER_RADIUS)
    X = np.vstack([inner, outer])
    # guard against a radius rounding onto the wrong side of the boundary
    y = sphere_label(X)
    return Dataset(SPHERES_SCHEMA, X, y)


def checkers_label(points: np.ndarray) -> np.ndarray:
    cells = np.floor(np.asarray(points) / SQUARE).astype(np.int64)
    return cells.sum(axis=1) % 2


def gen_checkers(n: int = 1000, seed: int = 0) -> Dataset:
    """Uniform points on [0, 1)^2; class is the parity of the 0.125-wide cell."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    X = rng.random((n, 2))
    return Dataset(CHECKERS_SCHEMA, X, checkers_label(X))


GENERATORS = {
    "two_spheres": lambda n, seed: gen_two_spheres(n, seed),
    "checkers": lambda n, seed: gen_checkers(n, seed),
}
