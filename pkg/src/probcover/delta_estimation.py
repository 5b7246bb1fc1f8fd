"""Choosing the ball radius from unlabeled data.

k-means cluster ids stand in for labels; ball purity is swept over a grid of
radii and the largest radius whose purity stays at or above ``alpha`` wins.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from probcover.covergraph import sq_dists
from probcover.data import EmbeddingSet, make_rng
from probcover.errors import ValidationError

DEFAULT_ALPHA = 0.95


@dataclass
class KMeansResult:
    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    iterations: int
    inertia_history: list[float] = field(default_factory=list)


def _kmeanspp(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(points)
    idx = [int(rng.integers(n))]
    d2 = sq_dists(points, points[idx[0]:idx[0] + 1])[:, 0]
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            # all remaining points coincide with a center; take the first unused
            used = set(idx)
            nxt = next(i for i in range(n) if i not in used)
        else:
            nxt = int(rng.choice(n, p=d2 / total))
        idx.append(nxt)
        d2 = np.minimum(d2, sq_dists(points, points[nxt:nxt + 1])[:, 0])
    return points[idx].copy()


def _assign(points, centroids):
    sq = sq_dists(points, centroids)
    a = np.argmin(sq, axis=1)
    return a, sq[np.arange(len(points)), a]


def _lloyd(points, k, rng, max_iters):
    centroids = _kmeanspp(points, k, rng)
    assign, d2 = _assign(points, centroids)
    history = [float(d2.sum())]
    it = 0
    while it < max_iters:
        it += 1
        for j in range(k):
            members = assign == j
            if members.any():
                centroids[j] = points[members].mean(axis=0)
            else:
                # empty cluster: move it onto the point worst served by its centroid
                far = int(np.argmax(d2))
                centroids[j] = points[far]
                d2[far] = 0.0
        new_assign, d2 = _assign(points, centroids)
        history.append(float(d2.sum()))
        if np.array_equal(new_assign, assign):
            assign = new_assign
            break
        assign = new_assign
    return KMeansResult(assign, centroids, float(d2.sum()), it, history)


def kmeans(es: EmbeddingSet, k: int, seed: int = 0, max_iters: int = 300,
           restarts: int = 1) -> KMeansResult:
    """Lloyd's algorithm from k-means++ seeds.

    Stops when an assignment pass changes nothing or after ``max_iters``
    update steps. With ``restarts > 1`` the lowest-inertia run is kept; all
    runs draw from a single generator seeded with ``seed``.
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if k > es.n:
        raise ValidationError(f"k={k} exceeds the number of points {es.n}")
    if max_iters < 1 or restarts < 1:
        raise ValidationError("max_iters and restarts must be >= 1")
    rng = make_rng(seed)
    best = None
    for _ in range(restarts):
        res = _lloyd(es.points, k, rng, max_iters)
        if best is None or res.inertia < best.inertia:
            best = res
    return best


def conflict_sq_dists(points: np.ndarray, labels: np.ndarray, block: int = 512,
                      rows: np.ndarray | None = None) -> np.ndarray:
    """Squared distance from each point to its nearest differently-labeled point.

    ``inf`` when every point shares its label. A ball of radius ``delta``
    around ``x`` is pure iff this value exceeds ``delta**2``.
    """
    rows = np.arange(len(points)) if rows is None else np.asarray(rows)
    out = np.empty(len(rows))
    for s in range(0, len(rows), block):
        r = rows[s:s + block]
        sq = sq_dists(points[r], points)
        sq[labels[r][:, None] == labels[None, :]] = np.inf
        out[s:s + block] = sq.min(axis=1)
    return out


def _check_labels(es: EmbeddingSet, labels) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.shape != (es.n,):
        raise ValidationError(f"label array has shape {labels.shape}, expected ({es.n},)")
    return labels


def purity(es: EmbeddingSet, pseudo_labels, delta: float) -> float:
    """Fraction of points whose delta-ball holds a single label."""
    if not delta > 0:
        raise ValidationError(f"delta must be > 0, got {delta}")
    labels = _check_labels(es, pseudo_labels)
    conflict = conflict_sq_dists(es.points, labels)
    return float(np.mean(conflict > delta * delta))


def purity_curve_values(es: EmbeddingSet, labels, deltas, sample: int | None = None,
                        seed: int = 0) -> np.ndarray:
    """Purity at every radius in ``deltas`` from one nearest-conflict pass.

    ``sample`` restricts the ball centers to a seeded uniform subsample; the
    balls themselves still range over all points.
    """
    labels = _check_labels(es, labels)
    rows = None
    if sample is not None and sample < es.n:
        rows = np.sort(make_rng(seed).choice(es.n, size=sample, replace=False))
    conflict = conflict_sq_dists(es.points, labels, rows=rows)
    d = np.asarray(deltas, dtype=np.float64)
    return (conflict[None, :] > (d * d)[:, None]).mean(axis=1)


def default_delta_grid(es: EmbeddingSet, size: int = 50, pairs: int = 10_000,
                       seed: int = 0) -> list[float]:
    """Log-spaced radii between the 0.1th and 90th percentile of sampled pair distances."""
    if es.n < 2:
        raise ValidationError("need at least two points to derive a delta grid")
    rng = make_rng(seed)
    i = rng.integers(es.n, size=pairs)
    j = rng.integers(es.n - 1, size=pairs)
    j = j + (j >= i)
    diff = es.points[i] - es.points[j]
    dist = np.sqrt((diff * diff).sum(axis=1))
    pos = dist[dist > 0]
    if pos.size == 0:
        raise ValidationError("all sampled pairs coincide; cannot derive a delta grid")
    lo, hi = np.percentile(pos, [0.1, 90])
    if hi <= lo:
        return [float(lo)]
    return [float(v) for v in np.geomspace(lo, hi, size)]


@dataclass
class PurityCurve:
    deltas: list[float]
    purity: list[float]
    alpha: float
    delta_star: float
    fallback: bool = False
    purity_true: list[float] | None = None
    k: int | None = None

    def to_csv(self) -> str:
        cols = ["delta", "purity"] + (["purity_true"] if self.purity_true is not None else [])
        lines = [",".join(cols)]
        for i, (d, p) in enumerate(zip(self.deltas, self.purity)):
            row = [repr(float(d)), repr(float(p))]
            if self.purity_true is not None:
                row.append(repr(float(self.purity_true[i])))
            lines.append(",".join(row))
        lines.append(f"# delta_star={self.delta_star!r} alpha={self.alpha!r}")
        return "\n".join(lines) + "\n"


def resolve_delta_star(deltas, purities, alpha) -> tuple[float, bool]:
    ok = [d for d, p in zip(deltas, purities) if p >= alpha]
    if ok:
        return max(ok), False
    return min(deltas), True


def estimate_delta(es: EmbeddingSet, k: int, alpha: float = DEFAULT_ALPHA, grid=None,
                   seed: int = 0, max_iters: int = 300, restarts: int = 1,
                   purity_sample: int | None = None) -> PurityCurve:
    """Largest grid radius whose pseudo-label purity is at least ``alpha``.

    When no radius qualifies the smallest one is returned with
    ``fallback=True`` and a ``RuntimeWarning``. If ``es`` carries true labels
    the curve also records their purity for comparison.
    """
    if not 0 < alpha < 1:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha}")
    if grid is None:
        grid = default_delta_grid(es, seed=seed)
    grid = [float(g) for g in grid]
    if not grid:
        raise ValidationError("delta grid is empty")
    if any(g <= 0 for g in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("delta grid must be positive and strictly ascending")
    km = kmeans(es, k, seed=seed, max_iters=max_iters, restarts=restarts)
    pur = purity_curve_values(es, km.assignments, grid, purity_sample, seed)
    true_pur = None
    if es.labels is not None:
        true_pur = [float(p) for p in purity_curve_values(es, es.labels, grid, purity_sample, seed)]
    pur = [float(p) for p in pur]
    star, fallback = resolve_delta_star(grid, pur, alpha)
    if fallback:
        warnings.warn(
            f"no delta in the grid reaches purity {alpha}; using the smallest, {star}",
            RuntimeWarning, stacklevel=2,
        )
    return PurityCurve(grid, pur, alpha, star, fallback, true_pur, k)
