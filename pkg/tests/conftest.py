"""Shared builders and independent reference implementations.

The references here (breadth-first shortest path, widest-path bottleneck,
brute-force influence) are deliberately written without using the package's
solvers, so tests compare two independent computations.
"""

from __future__ import annotations

import heapq
import random
from pathlib import Path

import pytest

from subreco import (
    AdjacencyRule,
    CoverageSpec,
    GroundSet,
    SetFunctionOracle,
    Subset,
    WeightedGraph,
    coverage_oracle,
    cut_oracle,
    is_adjacent,
)

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


# ---------------------------------------------------------------------------
# random oracle builders


def random_coverage_spec(rng: random.Random, n: int, items: int) -> CoverageSpec:
    covered = []
    for _ in range(n):
        size = rng.randint(0, items)
        covered.append(tuple(rng.sample(range(items), size)))
    return CoverageSpec(items, tuple(covered), divisor=rng.choice([1.0, 2.0, 4.0]))


def random_monotone_oracle(rng: random.Random, n: int) -> SetFunctionOracle:
    """Positive mixture of coverage functions: monotone submodular nonnegative."""
    parts = [
        (rng.uniform(0.5, 2.0), coverage_oracle(random_coverage_spec(rng, n, rng.randint(2, 10))))
        for _ in range(rng.randint(1, 3))
    ]

    def fn(s: Subset) -> float:
        return sum(w * g.evaluate(s) for w, g in parts)

    return SetFunctionOracle(
        fn,
        GroundSet(n),
        claims_monotone=True,
        claims_submodular=True,
        claims_nonnegative=True,
        name="coverage_mixture",
    )


def random_graph(rng: random.Random, n: int, p: float = 0.5) -> WeightedGraph:
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.append((u, v, rng.choice([1.0, 0.5, 2.0])))
    return WeightedGraph.build(n, edges)


def random_nonnegative_oracle(rng: random.Random, n: int) -> SetFunctionOracle:
    """Cut plus coverage mixture: submodular nonnegative, generally not monotone."""
    cut = cut_oracle(random_graph(rng, n))
    cover = coverage_oracle(random_coverage_spec(rng, n, rng.randint(2, 8)))
    w1, w2 = rng.uniform(0.2, 2.0), rng.uniform(0.0, 2.0)

    def fn(s: Subset) -> float:
        return w1 * cut.evaluate(s) + w2 * cover.evaluate(s)

    return SetFunctionOracle(
        fn,
        GroundSet(n),
        claims_monotone=False,
        claims_submodular=True,
        claims_nonnegative=True,
        name="cut_plus_coverage",
    )


def random_subset(rng: random.Random, n: int, size: int) -> Subset:
    return Subset(n, rng.sample(range(n), size))


# ---------------------------------------------------------------------------
# independent references


def bfs_shortest_feasible(
    oracle: SetFunctionOracle,
    x: Subset,
    y: Subset,
    rule: AdjacencyRule,
    theta: float,
    slack: float = 1e-9,
):
    """Shortest feasible path length by plain breadth-first search, or None.

    Enumerates the whole lattice up front; independent of the package's
    search code (adjacency is re-derived from symmetric-difference counts).
    """
    n = x.n
    bound = theta - slack
    feasible = [
        oracle.evaluate(Subset.from_mask(n, m)) >= bound for m in range(1 << n)
    ]
    if not feasible[x.mask] or not feasible[y.mask]:
        return None
    if x.mask == y.mask:
        return 0
    dist = {x.mask: 0}
    queue = [x.mask]
    qi = 0
    while qi < len(queue):
        mask = queue[qi]
        qi += 1
        s = Subset.from_mask(n, mask)
        for t_mask in range(1 << n):
            if t_mask in dist or not feasible[t_mask]:
                continue
            if is_adjacent(rule, s, Subset.from_mask(n, t_mask)):
                dist[t_mask] = dist[mask] + 1
                if t_mask == y.mask:
                    return dist[t_mask]
                queue.append(t_mask)
    return None


def widest_path_value(
    values: dict[int, float],
    rule: AdjacencyRule,
    n: int,
    x_mask: int,
    y_mask: int,
) -> float:
    """Max-min path value by a Dijkstra-style dynamic program.

    Independent reference for the union-find bottleneck solver.
    """
    best = {x_mask: values[x_mask]}
    heap = [(-values[x_mask], x_mask)]
    while heap:
        neg, mask = heapq.heappop(heap)
        width = -neg
        if width < best.get(mask, float("-inf")):
            continue
        if mask == y_mask:
            return width
        s = Subset.from_mask(n, mask)
        for t_mask in values:
            if t_mask == mask:
                continue
            if not is_adjacent(rule, s, Subset.from_mask(n, t_mask)):
                continue
            cand = min(width, values[t_mask])
            if cand > best.get(t_mask, float("-inf")):
                best[t_mask] = cand
                heapq.heappush(heap, (-cand, t_mask))
    return best.get(y_mask, float("-inf"))
