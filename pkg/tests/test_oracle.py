import itertools
import math

import numpy as np
import pytest

from probcover.data import EmbeddingSet
from probcover.errors import OracleLimitError
from probcover.oracle import OracleBudgetLimit, optimal_coverage, optimal_kcenter


def test_coverage_examples(line4):
    assert optimal_coverage(line4, [], 1, 1.5) == (0.75, [1])
    # [0, 3] covers {0, 1, 3} only, so the lexicographically first optimum is [1, 3]
    assert optimal_coverage(line4, [], 2, 1.5) == (1.0, [1, 3])
    assert optimal_coverage(line4, [], 4, 1.5) == (1.0, [0, 1, 2, 3])


def test_coverage_respects_pool(line4):
    assert optimal_coverage(line4, [1], 1, 1.5) == (1.0, [3])


def test_kcenter_examples(line4):
    assert optimal_kcenter(line4, [], 1) == (8.0, [2])
    assert optimal_kcenter(line4, [], 2) == (1.0, [1, 3])
    assert optimal_kcenter(line4, [], 4)[0] == 0.0


def test_refuses_large_instances():
    es = EmbeddingSet(np.zeros((30, 1)))
    with pytest.raises(OracleLimitError):
        optimal_coverage(es, [], 2, 1.0)
    small = EmbeddingSet(np.arange(20.0))
    with pytest.raises(OracleLimitError):
        optimal_kcenter(small, [], 6)
    with pytest.raises(OracleLimitError):
        optimal_coverage(small, [], 5, 1.0, limit=OracleBudgetLimit(max_steps=1000))


def test_monotone_in_budget():
    rng = np.random.default_rng(6)
    for _ in range(10):
        es = EmbeddingSet(rng.uniform(size=(12, 2)))
        covs = [optimal_coverage(es, [], b, 0.25)[0] for b in range(1, 5)]
        radii = [optimal_kcenter(es, [], b)[0] for b in range(1, 5)]
        assert covs == sorted(covs)
        assert radii == sorted(radii, reverse=True)


def test_kcenter_against_direct_enumeration():
    rng = np.random.default_rng(9)
    es = EmbeddingSet(rng.normal(size=(9, 2)))
    d = np.sqrt(((es.points[:, None] - es.points[None]) ** 2).sum(-1))
    best = min(d[:, list(c)].min(axis=1).max() for c in itertools.combinations(range(9), 3))
    assert math.isclose(optimal_kcenter(es, [], 3)[0], best, rel_tol=1e-12)
