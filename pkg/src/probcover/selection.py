"""Query strategies: ProbCover greedy, its 2-ball variant, Coreset, random."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from probcover.covergraph import CoverGraph, build_graph, sq_dists
from probcover.data import EmbeddingSet, as_index_array, make_rng
from probcover.errors import ValidationError


@dataclass
class Selection:
    strategy: str
    queried: list[int]
    coverage_trace: list[float] = field(default_factory=list)
    delta: float | None = None
    seed: int | None = None
    radius_trace: list[float] = field(default_factory=list)

    def to_record(self) -> dict:
        rec = {"strategy": self.strategy, "queried": [int(i) for i in self.queried]}
        if self.delta is not None:
            rec["delta"] = float(self.delta)
        if self.seed is not None:
            rec["seed"] = int(self.seed)
        if self.coverage_trace:
            rec["coverage_trace"] = [float(c) for c in self.coverage_trace]
        if self.radius_trace:
            rec["radius_trace"] = [float(r) for r in self.radius_trace]
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "Selection":
        return cls(
            strategy=rec["strategy"],
            queried=[int(i) for i in rec["queried"]],
            coverage_trace=[float(c) for c in rec.get("coverage_trace", [])],
            delta=rec.get("delta"),
            seed=rec.get("seed"),
            radius_trace=[float(r) for r in rec.get("radius_trace", [])],
        )


@dataclass(frozen=True)
class LabeledPool:
    indices: frozenset = frozenset()

    def __init__(self, indices=()):
        object.__setattr__(self, "indices", frozenset(int(i) for i in indices))

    def __len__(self):
        return len(self.indices)

    def sorted(self) -> list[int]:
        return sorted(self.indices)

    def validate(self, n: int):
        as_index_array(self.sorted(), n, "pool index")


def _as_pool(pool) -> LabeledPool:
    if pool is None:
        return LabeledPool()
    if isinstance(pool, LabeledPool):
        return pool
    return LabeledPool(pool)


def _check_budget(n: int, pool: LabeledPool, b: int):
    pool.validate(n)
    if b < 1:
        raise ValidationError(f"budget must be >= 1, got {b}")
    avail = n - len(pool)
    if b > avail:
        raise ValidationError(f"budget {b} exceeds the {avail} unlabeled points available")


def _check_delta(delta):
    if not (delta is not None and delta > 0 and np.isfinite(delta)):
        raise ValidationError(f"delta must be a positive finite number, got {delta}")


def _prepare_graph(es, pool, delta, graph, accel):
    if graph is None:
        graph = build_graph(es, delta, accel=accel)
    else:
        graph = graph.copy()
    taken = np.zeros(es.n, dtype=bool)
    n_cov = 0
    for c in pool.sorted():
        n_cov += graph.mark_covered(c)
        taken[c] = True
    return graph, taken, n_cov


def select_probcover(es: EmbeddingSet, pool=None, b: int = 1, delta: float = 1.0,
                     accel: str = "grid", graph: CoverGraph | None = None) -> Selection:
    """Greedy max coverage over the delta-ball graph.

    Pool members are covered first and never queried. Each step queries the
    unlabeled vertex whose ball holds the most uncovered points (lowest index
    on ties). Once everything is covered all degrees are zero, so the tie-break
    keeps returning the lowest-index remaining vertex and exactly ``b`` points
    come back.

    ``graph`` may be a prebuilt graph for ``delta``; it is copied, not mutated.
    """
    pool = _as_pool(pool)
    _check_delta(delta)
    _check_budget(es.n, pool, b)
    g, taken, n_cov = _prepare_graph(es, pool, delta, graph, accel)
    queried, trace = [], []
    for _ in range(b):
        c = g.max_outdegree_vertex(exclude=taken)
        n_cov += g.mark_covered(c)
        taken[c] = True
        queried.append(c)
        trace.append(n_cov / es.n)
    return Selection("probcover", queried, trace, delta=float(delta))


def _best_pair(g: CoverGraph, taken: np.ndarray) -> tuple[int, int, int]:
    """Unlabeled pair (u < v) with the largest joint number of newly covered points."""
    n = g.n
    live = ~g.covered
    cols = np.flatnonzero(live)
    adj = np.zeros((n, cols.size), dtype=np.int32)
    remap = np.full(n, -1, dtype=np.int64)
    remap[cols] = np.arange(cols.size)
    for x in range(n):
        nb = remap[g.neighbors(x)]
        adj[x, nb[nb >= 0]] = 1
    overlap = adj @ adj.T
    deg = g.out_degree
    gain = deg[:, None] + deg[None, :] - overlap
    gain[np.tril_indices(n)] = -1
    gain[taken, :] = -1
    gain[:, taken] = -1
    flat = int(np.argmax(gain))
    u, v = divmod(flat, n)
    return u, v, int(gain[u, v])


def select_probcover_pairs(es: EmbeddingSet, pool=None, b: int = 1, delta: float = 1.0,
                           accel: str = "grid", graph: CoverGraph | None = None) -> Selection:
    """Greedy over pairs of balls: each step queries the best pair jointly.

    The pair scan is exhaustive (dense overlap matrix), so this is meant for
    small instances. Ties go to the lexicographically smallest pair; an odd
    final step takes the best single vertex.
    """
    pool = _as_pool(pool)
    _check_delta(delta)
    _check_budget(es.n, pool, b)
    g, taken, n_cov = _prepare_graph(es, pool, delta, graph, accel)
    queried, trace = [], []
    while len(queried) < b:
        if b - len(queried) >= 2:
            picks = _best_pair(g, taken)[:2]
        else:
            picks = (g.max_outdegree_vertex(exclude=taken),)
        for c in picks:
            n_cov += g.mark_covered(c)
            taken[c] = True
            queried.append(int(c))
            trace.append(n_cov / es.n)
    return Selection("probcover-pairs", queried, trace, delta=float(delta))


def _min_dists(points: np.ndarray, centers) -> np.ndarray:
    out = np.full(len(points), np.inf)
    for c in centers:
        out = np.minimum(out, sq_dists(points, points[c:c + 1])[:, 0])
    return out


def coreset_radius(es: EmbeddingSet, centers) -> float:
    """Largest distance from any point to its nearest center."""
    idx = as_index_array(centers, es.n, "center")
    if idx.size == 0:
        raise ValidationError("coreset_radius needs at least one center")
    return float(np.sqrt(_min_dists(es.points, idx).max()))


def select_coreset(es: EmbeddingSet, pool=None, b: int = 1, seed: int = 0) -> Selection:
    """Farthest-first traversal (greedy k-center).

    With an empty pool the first center is drawn uniformly from ``seed``.
    ``radius_trace[i]`` is the covering radius of the labeled set at the
    moment query ``i`` is made, i.e. the distance from the chosen point to its
    nearest existing center (``inf`` for a cold-start first pick).
    """
    pool = _as_pool(pool)
    _check_budget(es.n, pool, b)
    pts = es.points
    taken = np.zeros(es.n, dtype=bool)
    centers = pool.sorted()
    taken[centers] = True
    mind = _min_dists(pts, centers)
    queried, radii = [], []
    if not centers:
        first = int(make_rng(seed).integers(es.n))
        queried.append(first)
        radii.append(float("inf"))
        taken[first] = True
        mind = sq_dists(pts, pts[first:first + 1])[:, 0]
    while len(queried) < b:
        cand = np.where(taken, -1.0, mind)
        c = int(np.argmax(cand))
        radii.append(float(np.sqrt(mind.max())))
        queried.append(c)
        taken[c] = True
        mind = np.minimum(mind, sq_dists(pts, pts[c:c + 1])[:, 0])
    return Selection("coreset", queried, seed=seed, radius_trace=radii)


def select_random(es: EmbeddingSet, pool=None, b: int = 1, seed: int = 0) -> Selection:
    pool = _as_pool(pool)
    _check_budget(es.n, pool, b)
    mask = np.ones(es.n, dtype=bool)
    mask[pool.sorted()] = False
    unlabeled = np.flatnonzero(mask)
    picks = make_rng(seed).permutation(unlabeled)[:b]
    return Selection("random", [int(i) for i in picks], seed=seed)


STRATEGIES = ("probcover", "probcover-pairs", "coreset", "random")


def run_strategy(name: str, es: EmbeddingSet, pool, b: int, delta=None, seed: int = 0,
                 graph: CoverGraph | None = None) -> Selection:
    if name == "probcover":
        return select_probcover(es, pool, b, delta, graph=graph)
    if name == "probcover-pairs":
        return select_probcover_pairs(es, pool, b, delta, graph=graph)
    if name == "coreset":
        return select_coreset(es, pool, b, seed)
    if name == "random":
        return select_random(es, pool, b, seed)
    raise ValidationError(f"unknown strategy {name!r}; choose from {', '.join(STRATEGIES)}")
