"""Exhaustive solvers for tiny instances, used to check the greedy strategies.

They refuse (``OracleLimitError``) instead of approximating when an instance
is too large.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from probcover.covergraph import sq_dists
from probcover.data import EmbeddingSet
from probcover.errors import OracleLimitError, ValidationError


@dataclass(frozen=True)
class OracleBudgetLimit:
    max_n: int = 25
    max_b: int = 5
    max_steps: int = 10**7


DEFAULT_LIMIT = OracleBudgetLimit()


def _unlabeled(es, pool, b, limit):
    pool = sorted(int(i) for i in getattr(pool, "indices", pool or ()))
    if any(not 0 <= i < es.n for i in pool):
        raise ValidationError("pool index out of range")
    free = [i for i in range(es.n) if i not in set(pool)]
    if b < 0 or b > len(free):
        raise ValidationError(f"budget {b} not in [0, {len(free)}]")
    steps = math.comb(len(free), b)
    if es.n > limit.max_n or b > limit.max_b or steps > limit.max_steps:
        raise OracleLimitError(
            f"oracle refuses n={es.n}, b={b} ({steps} subsets); limits are "
            f"n<={limit.max_n}, b<={limit.max_b}, {limit.max_steps} subsets"
        )
    return pool, free


def range_search_naive(es: EmbeddingSet, delta: float) -> list[list[int]]:
    """Ball membership by a plain double loop over all pairs."""
    thr = delta * delta
    out = []
    for i in range(es.n):
        row = sq_dists(es.points[i:i + 1], es.points)[0]
        out.append([j for j in range(es.n) if row[j] <= thr])
    return out


def optimal_coverage(es: EmbeddingSet, pool, b: int, delta: float,
                     limit: OracleBudgetLimit = DEFAULT_LIMIT) -> tuple[float, list[int]]:
    """Best coverage over all ``b``-subsets of unlabeled points (pool always included).

    Returns the lexicographically smallest optimal subset.
    """
    pool, free = _unlabeled(es, pool, b, limit)
    balls = [sum(1 << j for j in nb) for nb in range_search_naive(es, delta)]
    base = 0
    for p in pool:
        base |= balls[p]
    best, best_set = -1, None
    # combinations() yields subsets in lexicographic order; keep the first maximum
    for combo in itertools.combinations(free, b):
        m = base
        for c in combo:
            m |= balls[c]
        cnt = m.bit_count() if hasattr(m, "bit_count") else bin(m).count("1")
        if cnt > best:
            best, best_set = cnt, list(combo)
    return best / es.n, best_set


def optimal_kcenter(es: EmbeddingSet, pool, b: int,
                    limit: OracleBudgetLimit = DEFAULT_LIMIT) -> tuple[float, list[int]]:
    """Smallest covering radius over all ``b``-subsets unioned with the pool."""
    pool, free = _unlabeled(es, pool, b, limit)
    if b == 0 and not pool:
        raise ValidationError("k-center needs at least one center")
    sq = sq_dists(es.points, es.points)
    base = sq[pool].min(axis=0) if pool else np.full(es.n, np.inf)
    best, best_set = np.inf, None
    for combo in itertools.combinations(free, b):
        r = np.minimum(base, sq[list(combo)].min(axis=0)).max() if combo else base.max()
        if r < best:
            best, best_set = r, list(combo)
    return float(np.sqrt(best)), best_set
