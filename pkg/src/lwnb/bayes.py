"""Weighted naive Bayes: Laplace-smoothed priors and nominal conditionals,
weighted Gaussians for numeric attributes, and log-space posteriors.

How numeric attributes are handled follows from the schema: a numeric feature
gets a Gaussian, so data that was discretized beforehand (all-nominal schema)
is modelled purely with frequency tables.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .dataset import UNSEEN, AttributeSpec, Dataset, DatasetSchema

CORRECTED = "corrected"
AS_PRINTED = "as_printed"

STDEV_REL_FLOOR = 1e-6
STDEV_ABS_FLOOR = 1e-9

MODEL_FORMAT = "lwnb-weighted-nb"
MODEL_VERSION = 1

_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)
_TINY = np.finfo(float).tiny


@dataclass(frozen=True, eq=False)
class WeightedNBModel:
    """Fitted weighted naive Bayes model.

    Per feature ``j`` exactly one of ``tables[j]`` (nominal) and
    ``gaussians[j]`` (numeric) is set. ``tables[j]`` has shape (o, n_j).
    ``gaussians[j]`` is a (means, stdevs) pair of length-o arrays, or ``None``
    when the feature had no observed values at all and is ignored.

    ``class_weight[j]`` is the weight of each class among instances where
    feature ``j`` is observed; ``value_weight[j]`` is the weight of each value
    regardless of class (only used by the as-printed denominator).
    """

    schema: DatasetSchema
    priors: np.ndarray
    tables: tuple
    gaussians: tuple
    class_weight: tuple
    value_weight: tuple
    total_weight: float
    denominator: str = CORRECTED

    @property
    def n_classes(self) -> int:
        return self.priors.size

    def conditional(self, j: int, value) -> np.ndarray:
        """p(a_j = value | c) for every class c, including the unseen-value case."""
        a = self.schema.features[j]
        if value == UNSEEN:
            seen = 0.0 if self.denominator == AS_PRINTED else self.class_weight[j]
            return 1.0 / (a.cardinality + np.broadcast_to(seen, self.priors.shape))
        return self.tables[j][:, int(value)]

    def log_scores(self, X: np.ndarray) -> np.ndarray:
        """Unnormalized log posteriors, shape (rows, o)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.tile(np.log(self.priors), (X.shape[0], 1))
        for j, a in enumerate(self.schema.features):
            col = X[:, j]
            obs = ~np.isnan(col)
            if not obs.any():
                continue
            if a.is_nominal:
                logt = np.log(self.tables[j])
                known = obs & (col != UNSEEN)
                rows = np.flatnonzero(known)
                out[rows] += logt[:, col[known].astype(np.int64)].T
                unseen = np.flatnonzero(obs & (col == UNSEEN))
                if unseen.size:
                    out[unseen] += np.log(self.conditional(j, UNSEEN))
            else:
                g = self.gaussians[j]
                if g is None:
                    continue
                mu, sd = g
                z = (col[obs, None] - mu) / sd
                out[obs] += -0.5 * z * z - np.log(sd) - _LOG_SQRT_2PI
        return out

    def posterior(self, X: np.ndarray) -> np.ndarray:
        """Class posteriors; one row per instance (1-D input gives a 1-D result)."""
        X = np.asarray(X, dtype=float)
        s = self.log_scores(X)
        s -= s.max(axis=1, keepdims=True)
        # an underflowed class is still strictly more than zero
        p = np.maximum(np.exp(s), _TINY)
        p /= p.sum(axis=1, keepdims=True)
        return p[0] if X.ndim == 1 else p

    def predict(self, X: np.ndarray):
        p = self.posterior(X)
        # argmax returns the first maximum, i.e. the lowest class index on ties
        return np.argmax(p, axis=-1)

    def to_dict(self) -> dict:
        feats = []
        for j, a in enumerate(self.schema.features):
            entry = {"name": a.name, "kind": a.kind}
            if a.is_nominal:
                entry["values"] = list(a.values)
                entry["table"] = self.tables[j].tolist()
                entry["class_weight"] = self.class_weight[j].tolist()
                entry["value_weight"] = self.value_weight[j].tolist()
            elif self.gaussians[j] is not None:
                entry["mean"] = self.gaussians[j][0].tolist()
                entry["stdev"] = self.gaussians[j][1].tolist()
            else:
                entry["mean"] = entry["stdev"] = None
            feats.append(entry)
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "class_attribute": self.schema.class_attribute.name,
            "class_index": self.schema.class_index,
            "classes": list(self.schema.classes),
            "denominator": self.denominator,
            "total_weight": self.total_weight,
            "priors": self.priors.tolist(),
            "features": feats,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, doc: dict) -> "WeightedNBModel":
        if doc.get("format") != MODEL_FORMAT:
            raise ValueError("not a weighted naive Bayes model document")
        if doc.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {doc.get('version')!r}")
        feats, tables, gaussians, cw, vw = [], [], [], [], []
        for f in doc["features"]:
            if f["kind"] == "nominal":
                feats.append(AttributeSpec.nominal(f["name"], f["values"]))
                tables.append(np.array(f["table"], dtype=float))
                cw.append(np.array(f["class_weight"], dtype=float))
                vw.append(np.array(f["value_weight"], dtype=float))
                gaussians.append(None)
            else:
                feats.append(AttributeSpec.numeric(f["name"]))
                tables.append(None)
                cw.append(None)
                vw.append(None)
                if f["mean"] is None:
                    gaussians.append(None)
                else:
                    gaussians.append((np.array(f["mean"], dtype=float), np.array(f["stdev"], dtype=float)))
        attrs = list(feats)
        attrs.insert(doc["class_index"], AttributeSpec.nominal(doc["class_attribute"], doc["classes"]))
        schema = DatasetSchema(tuple(attrs), doc["class_index"])
        return cls(schema, np.array(doc["priors"], dtype=float), tuple(tables), tuple(gaussians),
                   tuple(cw), tuple(vw), float(doc["total_weight"]), doc["denominator"])

    @classmethod
    def from_json(cls, text: str) -> "WeightedNBModel":
        return cls.from_dict(json.loads(text))


def _weighted_gaussian(x: np.ndarray, w: np.ndarray, floor: float):
    mu = float((w * x).sum() / w.sum())
    var = float((w * (x - mu) ** 2).sum() / w.sum())
    return mu, max(math.sqrt(var), floor)


def fit_arrays(schema: DatasetSchema, X: np.ndarray, y: np.ndarray, weights: np.ndarray,
               ranges: np.ndarray | None = None, denominator: str = CORRECTED) -> WeightedNBModel:
    """Fit from raw arrays; see :func:`fit_weighted_nb`."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=np.int64)
    w = np.asarray(weights, dtype=float)
    if w.shape != y.shape or X.shape[0] != y.size:
        raise ValueError("weights, labels and rows must have equal length")
    if (w < 0).any():
        raise ValueError("weights must be non-negative")
    total = float(w.sum())
    if not total > 0:
        raise ValueError("at least one weight must be positive")
    if denominator not in (CORRECTED, AS_PRINTED):
        raise ValueError(f"unknown denominator {denominator!r}")

    o = schema.n_classes
    class_w = np.bincount(y, weights=w, minlength=o)
    priors = (1.0 + class_w) / (o + total)

    tables, gaussians, cws, vws = [], [], [], []
    for j, a in enumerate(schema.features):
        col = X[:, j]
        obs = ~np.isnan(col)
        if a.is_nominal:
            nj = a.cardinality
            known = obs & (col != UNSEEN)
            idx = y[known] * nj + col[known].astype(np.int64)
            counts = np.bincount(idx, weights=w[known], minlength=o * nj).reshape(o, nj)
            cw = counts.sum(axis=1)
            vw = counts.sum(axis=0)
            if denominator == CORRECTED:
                table = (1.0 + counts) / (nj + cw[:, None])
            else:
                table = (1.0 + counts) / (nj + vw[None, :])
            tables.append(table)
            gaussians.append(None)
            cws.append(cw)
            vws.append(vw)
            continue

        tables.append(None)
        cws.append(None)
        vws.append(None)
        xs, ws, ys = col[obs], w[obs], y[obs]
        if ws.sum() <= 0:
            gaussians.append(None)
            continue
        if ranges is not None:
            span = float(ranges[j])
        else:
            span = float(xs.max() - xs.min())
        floor = max(STDEV_REL_FLOOR * span, STDEV_ABS_FLOOR)
        pooled = _weighted_gaussian(xs, ws, floor)
        mus, sds = np.empty(o), np.empty(o)
        for c in range(o):
            sel = ys == c
            if ws[sel].sum() > 0:
                mus[c], sds[c] = _weighted_gaussian(xs[sel], ws[sel], floor)
            else:
                # no evidence for this class here: use the class-blind estimate
                mus[c], sds[c] = pooled
        gaussians.append((mus, sds))

    return WeightedNBModel(schema, priors, tuple(tables), tuple(gaussians), tuple(cws), tuple(vws),
                           total, denominator)


def fit_weighted_nb(train: Dataset, weights: np.ndarray, ranges: np.ndarray | None = None,
                    denominator: str = CORRECTED) -> WeightedNBModel:
    """Fit naive Bayes to ``train`` with per-instance ``weights``.

    Priors and nominal conditionals use the Laplace estimator on weighted
    counts. By default the conditional denominator is n_j plus the weight of
    the class among instances where the attribute is observed, so every
    conditional row sums to one; ``denominator="as_printed"`` uses the
    value-weight variant instead. Numeric attributes get a weighted mean and
    (biased) weighted variance per class. The standard deviation is floored at
    ``max(1e-6 * range, 1e-9)``, where range comes from ``ranges`` or else from
    the data passed in. Missing cells are left out of that attribute's
    statistics but still count towards the prior.
    """
    return fit_arrays(train.schema, train.X, train.y, weights, ranges=ranges, denominator=denominator)


def posterior(model: WeightedNBModel, inst: np.ndarray) -> np.ndarray:
    return model.posterior(inst)


def predict(model: WeightedNBModel, inst: np.ndarray):
    return model.predict(inst)
