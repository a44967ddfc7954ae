"""Whole-pipeline classifiers: locally weighted naive Bayes, naive Bayes, kNN.

Each classifier fits its preprocessing on the training set it is given, once,
and reuses it for every query.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .bayes import CORRECTED, WeightedNBModel, fit_arrays
from .dataset import Dataset
from .neighbors import NeighborSet, k_nearest
from .preprocess import Binarizer, Discretizer, fit_discretizer, fit_normalizer
from .weighting import Kernel, compute_weights, linear_kernel, rescale_weights

GAUSSIAN = "gaussian"
DISCRETIZE = "discretize"
KINDS = ("lwnb", "nb", "knn", "knn_dw")


class _Prepared:
    """Training data in both the modelling and the distance representation."""

    def __init__(self, train: Dataset, numeric_mode: str):
        if numeric_mode not in (GAUSSIAN, DISCRETIZE):
            raise ValueError(f"unknown numeric mode {numeric_mode!r}")
        if len(train) == 0:
            raise ValueError("empty training set")
        self.numeric_mode = numeric_mode
        self.discretizer: Discretizer | None = None
        if numeric_mode == DISCRETIZE:
            self.discretizer = fit_discretizer(train)
            train = self.discretizer.apply(train)
        self.train = train
        self.normalizer = fit_normalizer(train)
        self.ranges = self.normalizer.ranges
        self.layout = Binarizer.from_schema(train.schema)
        self.space = self.layout.apply(self.normalizer.apply(train.X))

    def model_rows(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self.discretizer is not None:
            X = self.discretizer.apply_matrix(X)
        return X

    def distance_rows(self, model_rows: np.ndarray) -> np.ndarray:
        return self.layout.apply(self.normalizer.apply(model_rows))

    def clamp(self, k: int) -> int:
        n = len(self.train)
        if k > n:
            warnings.warn(f"k={k} exceeds {n} training instances; using k={n}", stacklevel=3)
            return n
        return k


@dataclass(frozen=True, eq=False)
class LocalTrace:
    """Every intermediate quantity of one LWNB prediction."""

    neighbors: NeighborSet
    raw_weights: np.ndarray
    weights: np.ndarray
    model: WeightedNBModel
    posterior: np.ndarray

    @property
    def prediction(self) -> int:
        return int(np.argmax(self.posterior))


class LWNB:
    """Locally weighted naive Bayes.

    For each query a naive Bayes model is fitted to the neighbors within the
    distance of the k-th nearest one, weighted by ``kernel(d_i / d_k)`` and
    rescaled so the weights sum to the number of retained neighbors.
    """

    def __init__(self, k: int = 50, numeric_mode: str = GAUSSIAN, kernel: Kernel = linear_kernel,
                 denominator: str = CORRECTED):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k
        self.numeric_mode = numeric_mode
        self.kernel = kernel
        self.denominator = denominator

    def fit(self, train: Dataset) -> "LWNB":
        self._prep = _Prepared(train, self.numeric_mode)
        self._k = self._prep.clamp(self.k)
        return self

    def _explain_row(self, row: np.ndarray, point: np.ndarray) -> LocalTrace:
        p = self._prep
        nbrs = k_nearest(p.space, point, self._k, p.layout)
        raw = compute_weights(nbrs, self.kernel)
        w = rescale_weights(raw, len(nbrs))
        model = fit_arrays(p.train.schema, p.train.X[nbrs.indices], p.train.y[nbrs.indices], w,
                           ranges=p.ranges, denominator=self.denominator)
        return LocalTrace(nbrs, raw, w, model, model.posterior(row))

    def explain(self, x: np.ndarray) -> LocalTrace:
        row = self._prep.model_rows(x)
        return self._explain_row(row, self._prep.distance_rows(row))

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        rows = np.atleast_2d(self._prep.model_rows(X))
        points = self._prep.distance_rows(rows)
        return np.array([self._explain_row(r, q).posterior for r, q in zip(rows, points)])

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)


class NaiveBayes:
    """Standard naive Bayes: the weighted estimator with every weight equal to 1."""

    def __init__(self, numeric_mode: str = GAUSSIAN, denominator: str = CORRECTED):
        self.numeric_mode = numeric_mode
        self.denominator = denominator

    def fit(self, train: Dataset) -> "NaiveBayes":
        self._prep = _Prepared(train, self.numeric_mode)
        t = self._prep.train
        self.model = fit_arrays(t.schema, t.X, t.y, np.ones(len(t)), ranges=self._prep.ranges,
                                denominator=self.denominator)
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self.model.posterior(np.atleast_2d(self._prep.model_rows(X)))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)


class KNN:
    """k-nearest neighbours, optionally voting with linear-kernel weights.

    All instances tied at the k-th distance take part in the vote; class ties
    go to the lowest class index.
    """

    def __init__(self, k: int = 5, distance_weighted: bool = False, numeric_mode: str = GAUSSIAN,
                 kernel: Kernel = linear_kernel):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k
        self.distance_weighted = distance_weighted
        self.numeric_mode = numeric_mode
        self.kernel = kernel

    def fit(self, train: Dataset) -> "KNN":
        self._prep = _Prepared(train, self.numeric_mode)
        self._k = self._prep.clamp(self.k)
        return self

    def _votes(self, point: np.ndarray) -> np.ndarray:
        p = self._prep
        nbrs = k_nearest(p.space, point, self._k, p.layout)
        if self.distance_weighted:
            w = compute_weights(nbrs, self.kernel)
        else:
            w = np.ones(len(nbrs))
        return np.bincount(p.train.y[nbrs.indices], weights=w, minlength=p.train.schema.n_classes)

    def predict(self, X: np.ndarray) -> np.ndarray:
        rows = np.atleast_2d(self._prep.model_rows(X))
        points = self._prep.distance_rows(rows)
        return np.array([int(np.argmax(self._votes(q))) for q in points], dtype=np.int64)


@dataclass(frozen=True)
class ClassifierConfig:
    """One experimental arm, e.g. ``lwnb/k=50`` or ``nb/discretize``."""

    kind: str
    k: int | None = None
    numeric_mode: str = GAUSSIAN
    seed: int = 0
    options: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown classifier kind {self.kind!r}; expected one of {KINDS}")
        if self.numeric_mode not in (GAUSSIAN, DISCRETIZE):
            raise ValueError(f"unknown numeric mode {self.numeric_mode!r}")
        if self.kind != "nb":
            if self.k is None or self.k < 1:
                raise ValueError(f"{self.kind} needs k >= 1")
        elif self.k is not None:
            raise ValueError("nb does not take k")

    @property
    def label(self) -> str:
        s = self.kind if self.k is None else f"{self.kind}/k={self.k}"
        return s + "/discretize" if self.numeric_mode == DISCRETIZE else s

    @classmethod
    def parse(cls, text: str) -> "ClassifierConfig":
        """Inverse of :attr:`label`: ``kind[/k=N][/discretize|/gaussian]``."""
        parts = text.strip().split("/")
        kind, k, mode = parts[0], None, GAUSSIAN
        for p in parts[1:]:
            if p.startswith("k="):
                try:
                    k = int(p[2:])
                except ValueError:
                    raise ValueError(f"bad k in classifier spec {text!r}") from None
            elif p in (GAUSSIAN, DISCRETIZE):
                mode = p
            else:
                raise ValueError(f"unrecognized part {p!r} in classifier spec {text!r}")
        return cls(kind, k, mode)

    def build(self):
        if self.kind == "lwnb":
            return LWNB(self.k, self.numeric_mode, **self.options)
        if self.kind == "nb":
            return NaiveBayes(self.numeric_mode, **self.options)
        return KNN(self.k, self.kind == "knn_dw", self.numeric_mode, **self.options)


def lwnb_predict(train: Dataset, query: np.ndarray, k: int, numeric_mode: str = GAUSSIAN):
    """Class index and posterior for a single query."""
    trace = LWNB(k, numeric_mode).fit(train).explain(query)
    return trace.prediction, trace.posterior


def nb_train(train: Dataset, numeric_mode: str = GAUSSIAN) -> NaiveBayes:
    return NaiveBayes(numeric_mode).fit(train)


def nb_predict(model: NaiveBayes, query: np.ndarray):
    p = model.predict_proba(query)[0]
    return int(np.argmax(p)), p


def knn_predict(train: Dataset, query: np.ndarray, k: int, distance_weighted: bool = False) -> int:
    return int(KNN(k, distance_weighted).fit(train).predict(query)[0])
