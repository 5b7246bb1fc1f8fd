"""Scoring a labeled set: coverage, purity, the 1-NN error bound, 1-NN accuracy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from probcover.covergraph import build_graph, sq_dists
from probcover.data import EmbeddingSet, as_index_array
from probcover.delta_estimation import purity
from probcover.errors import ValidationError


def compute_bound(coverage: float, purity: float) -> float:
    """Upper bound on 1-NN error: uncovered mass plus impure mass, capped at 1."""
    for name, v in (("coverage", coverage), ("purity", purity)):
        if not (0.0 <= v <= 1.0):
            raise ValidationError(f"{name} must lie in [0, 1], got {v}")
    return min(1.0, (1.0 - coverage) + (1.0 - purity))


def nearest_train(train_points: np.ndarray, test_points: np.ndarray, block: int = 1024) -> np.ndarray:
    """Index of the nearest train row for every test row; lowest index on exact ties."""
    out = np.empty(len(test_points), dtype=np.int64)
    for s in range(0, len(test_points), block):
        out[s:s + block] = np.argmin(sq_dists(test_points[s:s + block], train_points), axis=1)
    return out


def knn_accuracy(train: EmbeddingSet, test: EmbeddingSet) -> float:
    if train.labels is None or test.labels is None:
        raise ValidationError("1-NN evaluation needs labels on both train and test sets")
    if train.n == 0:
        raise ValidationError("train set is empty")
    if train.d != test.d:
        raise ValidationError(f"dimension mismatch: train d={train.d}, test d={test.d}")
    pred = train.labels[nearest_train(train.points, test.points)]
    return float(np.mean(pred == test.labels))


@dataclass
class EvalReport:
    coverage: float
    purity_true: float | None
    bound: float | None
    knn_accuracy: float | None
    delta: float
    b: int

    FIELDS = ("b", "delta", "coverage", "purity_true", "bound", "knn_accuracy")

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.FIELDS}

    def to_kv(self) -> str:
        return "\n".join(f"{k}={_fmt(v)}" for k, v in self.as_dict().items()) + "\n"

    def csv_row(self) -> str:
        return ",".join(_fmt(v) for v in self.as_dict().values())

    @classmethod
    def csv_header(cls) -> str:
        return ",".join(cls.FIELDS)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def evaluate(es: EmbeddingSet, sel, pool, delta: float, test: EmbeddingSet | None) -> EvalReport:
    """Score ``pool + sel.queried`` on ``es`` at radius ``delta``.

    ``test`` is the held-out set for 1-NN; it must be non-empty and labeled.
    """
    pool_idx = sorted(getattr(pool, "indices", pool or ()))
    labeled = as_index_array(list(pool_idx) + list(sel.queried), es.n, "labeled index")
    if labeled.size == 0:
        raise ValidationError("nothing is labeled")
    if test is None:
        raise ValidationError("a non-empty labeled test set is required")
    g = build_graph(es, delta)
    cov = g.coverage(labeled)
    pur = bound = None
    if es.labels is not None:
        pur = purity(es, es.labels, delta)
        bound = compute_bound(cov, pur)
    acc = knn_accuracy(es.subset(labeled), test)
    return EvalReport(cov, pur, bound, acc, float(delta), int(labeled.size))

