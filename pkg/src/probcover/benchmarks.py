"""Synthetic desk-scale experiments shared by ``scripts/`` and the acceptance tests."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from probcover.covergraph import build_graph
from probcover.data import Component, MixtureSpec, generate_mixture, ring_means
from probcover.delta_estimation import estimate_delta
from probcover.evaluation import knn_accuracy
from probcover.selection import select_coreset, select_probcover

TEST_SEED_OFFSET = 10_000


def outlier_mixture(seed: int, n: int = 600, sep: float = 6.0, std: float = 1.0,
                    outlier_dist: float = 40.0, outlier_std: float = 4.0,
                    outlier_frac: float = 0.05) -> MixtureSpec:
    """Three dense classes on a ring plus one broad, far-away class holding 5% of the mass."""
    w = (1 - outlier_frac) / 3
    comps = [Component(m, std, w, i) for i, m in enumerate(ring_means(3, sep))]
    comps.append(Component((outlier_dist, 0.0), outlier_std, outlier_frac, 3))
    return MixtureSpec(comps, n, seed)


def ring_mixture(seed: int, n: int = 1000, m: int = 3, sep: float = 4.0,
                 std: float = 1.0) -> MixtureSpec:
    return MixtureSpec([Component(mu, std, 1.0, i) for i, mu in enumerate(ring_means(m, sep))],
                       n, seed)


@dataclass
class DualityRun:
    seed: int
    delta: float
    probcover_density: float
    coreset_density: float
    probcover_accuracy: float
    coreset_accuracy: float
    coreset_outlier_picks: int


def duality_run(seed: int, b: int = 5, **mixture) -> DualityRun:
    """ProbCover vs Coreset on one outlier-mixture draw.

    Delta comes from ``estimate_delta`` with k = 4; density of a query is the
    number of points inside its delta-ball. Accuracy is 1-NN on an
    independent draw from the same mixture.
    """
    spec = outlier_mixture(seed, **mixture)
    es = generate_mixture(spec)
    test = generate_mixture(outlier_mixture(seed + TEST_SEED_OFFSET, **mixture))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        delta = estimate_delta(es, len(spec.components), seed=seed).delta_star
    g = build_graph(es, delta)
    density = np.diff(g.indptr)
    pc = select_probcover(es, None, b, delta, graph=g)
    cs = select_coreset(es, None, b, seed)
    outlier_class = spec.components[-1].label
    return DualityRun(
        seed=seed,
        delta=delta,
        probcover_density=float(density[pc.queried].mean()),
        coreset_density=float(density[cs.queried].mean()),
        probcover_accuracy=knn_accuracy(es.subset(pc.queried), test),
        coreset_accuracy=knn_accuracy(es.subset(cs.queried), test),
        coreset_outlier_picks=int(np.sum(es.labels[cs.queried] == outlier_class)),
    )


DELTA_SWEEP = (0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0)


def delta_budget_grid(budgets=(3, 10, 30), deltas=DELTA_SWEEP, seeds=range(10),
                      **mixture) -> dict[int, list[float]]:
    """Mean 1-NN accuracy of ProbCover for every (budget, delta) pair over ``seeds``."""
    data = []
    for s in seeds:
        es = generate_mixture(ring_mixture(s, **mixture))
        test = generate_mixture(ring_mixture(s + TEST_SEED_OFFSET, **mixture))
        data.append((es, test))
    graphs = {d: [build_graph(es, d) for es, _ in data] for d in deltas}
    out = {}
    for b in budgets:
        row = []
        for d in deltas:
            accs = []
            for (es, test), g in zip(data, graphs[d]):
                sel = select_probcover(es, None, b, d, graph=g)
                accs.append(knn_accuracy(es.subset(sel.queried), test))
            row.append(float(np.mean(accs)))
        out[b] = row
    return out


def best_delta_per_budget(grid: dict[int, list[float]], deltas=DELTA_SWEEP) -> dict[int, float]:
    # argmax keeps the first (smallest) delta on exact ties
    return {b: float(deltas[int(np.argmax(row))]) for b, row in grid.items()}
