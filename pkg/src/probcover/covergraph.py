"""Directed delta-ball coverage graph.

Vertex ``x`` has an edge to ``x'`` iff ``||x - x'|| <= delta`` (self-loops
included). Every squared distance in the package goes through
:func:`sq_dists`, which accumulates coordinates in a fixed order, so the naive
and grid builds, purity, and 1-NN all agree on which pairs lie within a ball
bit for bit. Because ``(a - b)**2 == (b - a)**2`` exactly, the edge relation is
exactly symmetric and in-neighbours equal out-neighbours.
"""

from __future__ import annotations

import itertools
from collections import defaultdict

import numpy as np

from probcover.data import EmbeddingSet, as_index_array
from probcover.errors import CapacityError, ValidationError

DEFAULT_MAX_EDGES = 50_000_000
GRID_DIM_CAP = 3
GRID_MAX_DIM = 32
# cells slightly wider than delta absorb rounding in the cell coordinates
_CELL_SLACK = 1e-7


def sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between rows of ``a`` (m x d) and ``b`` (k x d)."""
    diff = a[:, None, 0] - b[None, :, 0]
    acc = diff * diff
    for j in range(1, a.shape[1]):
        diff = a[:, None, j] - b[None, :, j]
        acc += diff * diff
    return acc


class CoverGraph:
    """Adjacency in CSR form plus live coverage bookkeeping.

    ``out_degree[x]`` is always the number of not-yet-covered vertices inside
    ``x``'s ball; ``mark_covered`` is the only mutator.
    """

    def __init__(self, n: int, delta: float, indptr: np.ndarray, indices: np.ndarray):
        self.n = n
        self.delta = float(delta)
        self.indptr = indptr
        self.indices = indices
        self.covered = np.zeros(n, dtype=bool)
        self.out_degree = np.diff(indptr).astype(np.int64)

    @property
    def num_edges(self) -> int:
        return int(self.indptr[-1])

    def neighbors(self, x: int) -> np.ndarray:
        return self.indices[self.indptr[x]:self.indptr[x + 1]]

    @property
    def out_edges(self) -> list[np.ndarray]:
        return [self.neighbors(x) for x in range(self.n)]

    def edge_list(self) -> list[tuple[int, int]]:
        src = np.repeat(np.arange(self.n), np.diff(self.indptr))
        return list(zip(src.tolist(), self.indices.tolist()))

    def copy(self) -> "CoverGraph":
        g = CoverGraph(self.n, self.delta, self.indptr, self.indices)
        g.covered = self.covered.copy()
        g.out_degree = self.out_degree.copy()
        return g

    def _check(self, x) -> int:
        x = int(x)
        if not 0 <= x < self.n:
            raise ValidationError(f"vertex {x} out of range [0, {self.n})")
        return x

    def mark_covered(self, center: int) -> int:
        """Cover every vertex in ``center``'s ball; return how many were newly covered."""
        center = self._check(center)
        ball = self.neighbors(center)
        fresh = ball[~self.covered[ball]]
        if fresh.size == 0:
            return 0
        self.covered[fresh] = True
        # in-neighbours of x' are its out-neighbours (symmetric relation)
        for v in fresh:
            self.out_degree[self.neighbors(v)] -= 1
        return int(fresh.size)

    def max_outdegree_vertex(self, exclude=None) -> int:
        """Vertex with the largest live out-degree, lowest index on ties.

        Vertices in ``exclude`` (a boolean mask) are never returned unless
        every vertex is excluded.
        """
        if exclude is None:
            return int(np.argmax(self.out_degree))
        masked = np.where(exclude, -1, self.out_degree)
        return int(np.argmax(masked))

    def coverage(self, centers) -> float:
        idx = as_index_array(centers, self.n, "vertex")
        if idx.size == 0:
            return 0.0
        hit = np.zeros(self.n, dtype=bool)
        for c in idx:
            hit[self.neighbors(c)] = True
        return float(hit.sum()) / self.n

    def dump(self) -> str:
        lines = []
        for x in range(self.n):
            nb = " ".join(str(v) for v in self.neighbors(x))
            lines.append(f"{x}: {nb}".rstrip())
        return "\n".join(lines) + "\n"


def _assemble(n: int, delta: float, rows: list[np.ndarray]) -> CoverGraph:
    lengths = np.fromiter((len(r) for r in rows), dtype=np.int64, count=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(lengths, out=indptr[1:])
    indices = np.concatenate(rows).astype(np.int64) if n else np.zeros(0, np.int64)
    return CoverGraph(n, delta, indptr, indices)


def _budget_check(edges: int, done: int, n: int, max_edges: int):
    if edges > max_edges:
        estimate = int(edges * n / max(done, 1))
        raise CapacityError(
            f"coverage graph would hold about {estimate} edges, "
            f"over the budget of {max_edges}; use a smaller delta"
        )


def _build_naive(points: np.ndarray, delta: float, max_edges: int, block: int = 256):
    n = len(points)
    thr = delta * delta
    rows: list[np.ndarray] = []
    edges = 0
    for start in range(0, n, block):
        sq = sq_dists(points[start:start + block], points)
        for r in sq:
            nb = np.flatnonzero(r <= thr)
            rows.append(nb)
            edges += nb.size
        _budget_check(edges, len(rows), n, max_edges)
    return rows


def _build_grid(points: np.ndarray, delta: float, max_edges: int):
    n, d = points.shape
    m = min(d, GRID_DIM_CAP)
    thr = delta * delta
    proj = points[:, :m]
    cell = delta * (1 + _CELL_SLACK)
    keys = np.floor((proj - proj.min(axis=0)) / cell).astype(np.int64)
    buckets: dict[tuple, list[int]] = defaultdict(list)
    for i, k in enumerate(map(tuple, keys)):
        buckets[k].append(i)
    offsets = list(itertools.product((-1, 0, 1), repeat=m))

    rows: list[np.ndarray | None] = [None] * n
    edges = done = 0
    for key, members in buckets.items():
        cand = []
        for off in offsets:
            nb = buckets.get(tuple(a + b for a, b in zip(key, off)))
            if nb:
                cand.extend(nb)
        cand = np.sort(np.asarray(cand, dtype=np.int64))
        mem = np.asarray(members, dtype=np.int64)
        sq = sq_dists(points[mem], points[cand])
        for i, r in zip(mem, sq):
            nb = cand[r <= thr]
            rows[i] = nb
            edges += nb.size
        done += len(mem)
        _budget_check(edges, done, n, max_edges)
    return rows


def build_graph(es: EmbeddingSet, delta: float, accel: str = "grid",
                max_edges: int = DEFAULT_MAX_EDGES) -> CoverGraph:
    """Build the delta-ball graph of ``es``.

    ``accel="grid"`` buckets points into cells of side ``delta`` over the first
    few coordinates and scans adjacent cells only; it is exact. Above
    ``GRID_MAX_DIM`` dimensions it falls back to the naive all-pairs scan.
    """
    if not (delta > 0 and np.isfinite(delta)):
        raise ValidationError(f"delta must be a positive finite number, got {delta}")
    if accel not in ("naive", "grid"):
        raise ValidationError(f"unknown accelerator {accel!r}")
    points = es.points
    if accel == "grid" and es.d <= GRID_MAX_DIM:
        rows = _build_grid(points, float(delta), max_edges)
    else:
        rows = _build_naive(points, float(delta), max_edges)
    return _assemble(es.n, float(delta), rows)


def mark_covered(g: CoverGraph, center: int) -> int:
    return g.mark_covered(center)


def max_outdegree_vertex(g: CoverGraph) -> int:
    return g.max_outdegree_vertex()


def coverage(g: CoverGraph, centers) -> float:
    return g.coverage(centers)
