"""Reconfiguration algorithms: greedy ordering, two approximations, and A*.

The two constructive algorithms trade generality for guarantees:

* :func:`swap_reconfigure` handles equal-size endpoints under the exchange
  rule, always finishes in ``|X - Y|`` steps, and its sequence value is at
  least ``max(1/2, (1 - kappa)^2)`` times ``min(f(X), f(Y))`` for monotone
  submodular ``f`` with total curvature ``kappa``.
* :func:`tjar_reconfigure` handles any nonempty endpoints when additions and
  removals are also allowed, and guarantees a ``1/n`` fraction of
  ``min(f(X), f(Y))`` for nonnegative submodular ``f``.

:func:`astar` finds a shortest sequence whose every step clears a threshold,
at exponential worst-case cost; it answers exactly or reports that its node
budget ran out.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Optional

from .core import (
    AdjacencyRule,
    ProblemInstance,
    ReconfigSequence,
    SetFunctionOracle,
    Subset,
    VALUE_SLACK,
    neighbors,
    residual,
)


@dataclass(frozen=True)
class GreedyTrace:
    """Result of a greedy run: pick order, prefix values, and call count."""

    elements: tuple[int, ...]
    prefix_values: tuple[float, ...]
    oracle_calls: int


def greedy(f: SetFunctionOracle, ground: Subset, k: int) -> GreedyTrace:
    """Pick ``k`` elements of ``ground`` by largest value of the grown prefix.

    Step ``i`` evaluates every remaining candidate once, so the total cost is
    exactly ``sum_{i=1..k} (|ground| - i + 1)`` oracle calls.  Ties go to the
    smallest element id.  For submodular ``f`` the prefix marginals are
    nonincreasing.
    """
    if not 0 <= k <= len(ground):
        raise ValueError(f"cannot pick {k} elements from {len(ground)}")
    n = ground.n
    chosen_mask = 0
    remaining = ground.mask
    elements: list[int] = []
    values: list[float] = []
    calls = 0
    for _ in range(k):
        best_e = -1
        best_v = 0.0
        m = remaining
        while m:
            low = m & -m
            m ^= low
            e = low.bit_length() - 1
            v = f.evaluate(Subset.from_mask(n, chosen_mask | low))
            calls += 1
            if best_e < 0 or v > best_v:
                best_e, best_v = e, v
        elements.append(best_e)
        values.append(best_v)
        chosen_mask |= 1 << best_e
        remaining ^= 1 << best_e
    return GreedyTrace(tuple(elements), tuple(values), calls)


def swap_reconfigure(
    f: SetFunctionOracle, x: Subset, y: Subset
) -> ReconfigSequence:
    """Exchange-walk from X to Y through greedy orderings of both sides.

    The shared part ``R = X & Y`` stays put.  Both private parts are ordered
    greedily under the residual function on R, and step ``i`` keeps the first
    ``|X - R| - i`` elements of X's order plus the first ``i`` of Y's order.
    Consecutive steps differ by exactly one exchange and every step has size
    ``|X|``.
    """
    if x.n != f.universe.n or y.n != f.universe.n:
        raise ValueError("endpoints over wrong universe")
    if len(x) != len(y):
        raise ValueError(f"endpoint sizes differ: {len(x)} vs {len(y)}")
    shared = x & y
    x_only = x - shared
    y_only = y - shared
    k = len(x_only)
    if k == 0:
        return ReconfigSequence([x])
    res = residual(f, shared)
    order_x = greedy(res, x_only, k).elements
    order_y = greedy(res, y_only, k).elements
    n = x.n
    steps = []
    for i in range(k + 1):
        mask = shared.mask
        for e in order_x[: k - i]:
            mask |= 1 << e
        for e in order_y[:i]:
            mask |= 1 << e
        steps.append(Subset.from_mask(n, mask))
    return ReconfigSequence(steps)


def tjar_reconfigure(
    f: SetFunctionOracle, x: Subset, y: Subset
) -> ReconfigSequence:
    """Shrink X to its best greedy singleton, jump, and regrow Y.

    Both endpoints are ordered greedily under ``f`` itself; the sequence walks
    down X's prefixes, exchanges the two best singletons, and walks up Y's
    prefixes, with consecutive duplicates collapsed.  Needs nonempty
    endpoints and at most ``|X| + |Y|`` subsets.
    """
    if x.n != f.universe.n or y.n != f.universe.n:
        raise ValueError("endpoints over wrong universe")
    if len(x) == 0 or len(y) == 0:
        raise ValueError("endpoints must be nonempty")
    order_x = greedy(f, x, len(x)).elements
    order_y = greedy(f, y, len(y)).elements
    n = x.n
    prefixes_down = []
    mask = 0
    for e in order_x:
        mask |= 1 << e
        prefixes_down.append(mask)
    raw = [Subset.from_mask(n, m) for m in reversed(prefixes_down)]
    mask = 0
    for e in order_y:
        mask |= 1 << e
        raw.append(Subset.from_mask(n, mask))
    steps = [raw[0]]
    for s in raw[1:]:
        if s != steps[-1]:
            steps.append(s)
    return ReconfigSequence(steps)


def default_heuristic(
    rule: AdjacencyRule, y: Subset
) -> Callable[[Subset], float]:
    """Admissible, consistent step-count lower bounds towards Y.

    One exchange fixes one missing and one surplus element, one addition or
    removal fixes one side of the difference; the bounds count accordingly.
    """
    y_mask = y.mask

    if rule is AdjacencyRule.TJ:

        def h_tj(s: Subset) -> float:
            return ((s.mask & ~y_mask).bit_count() + (y_mask & ~s.mask).bit_count()) / 2

        return h_tj
    if rule is AdjacencyRule.TAR:

        def h_tar(s: Subset) -> float:
            return float((s.mask ^ y_mask).bit_count())

        return h_tar

    def h_tjar(s: Subset) -> float:
        return float(
            max((s.mask & ~y_mask).bit_count(), (y_mask & ~s.mask).bit_count())
        )

    return h_tjar


@dataclass
class AstarConfig:
    """Knobs for :func:`astar`.

    ``heuristic`` defaults to the rule's bound from :func:`default_heuristic`;
    ties between equal scores pop most-recently-pushed first.  ``budget``
    bounds node expansions (default ``2 ** min(n, 24)``); ``theta`` overrides
    the instance threshold when set.
    """

    heuristic: Optional[Callable[[Subset], float]] = None
    budget: Optional[int] = None
    theta: Optional[float] = None
    value_slack: float = VALUE_SLACK


@dataclass(frozen=True)
class AstarResult:
    """Search outcome: ``found`` with a shortest sequence, ``no_path``, or
    ``inconclusive`` when the expansion budget ran out before an answer."""

    status: str
    sequence: Optional[ReconfigSequence]
    expansions: int
    oracle_calls: int

    def __bool__(self) -> bool:
        return self.status == "found"


def astar(instance: ProblemInstance, cfg: Optional[AstarConfig] = None) -> AstarResult:
    """Shortest threshold-feasible sequence from X to Y, by A*.

    Feasibility ``f(S) >= theta - slack`` is memoized per subset, so every
    distinct subset touched costs exactly one oracle call.  The open list is
    keyed by ``g + h`` with most-recent-first tie-breaking; closed nodes are
    reopened if a shorter path to them appears (not possible with the default
    consistent heuristics, but supported).
    """
    cfg = cfg or AstarConfig()
    theta = cfg.theta if cfg.theta is not None else instance.theta
    if theta is None:
        raise ValueError("astar needs a threshold")
    f = instance.oracle
    n = f.universe.n
    rule = instance.rule
    h = cfg.heuristic or default_heuristic(rule, instance.y)
    budget = cfg.budget if cfg.budget is not None else 1 << min(n, 24)
    bound = theta - cfg.value_slack
    calls_before = f.calls

    feasible_cache: dict[int, bool] = {}

    def feasible(s: Subset) -> bool:
        v = feasible_cache.get(s.mask)
        if v is None:
            v = f.evaluate(s) >= bound
            feasible_cache[s.mask] = v
        return v

    def result(status, seq, expansions):
        return AstarResult(status, seq, expansions, f.calls - calls_before)

    # a sequence always contains both endpoints, so either being infeasible
    # settles the answer without searching
    if not feasible(instance.x) or not feasible(instance.y):
        return result("no_path", None, 0)

    x_mask = instance.x.mask
    y_mask = instance.y.mask
    g_score: dict[int, int] = {x_mask: 0}
    parent: dict[int, int] = {}
    open_set: set[int] = {x_mask}
    closed_set: set[int] = set()
    open_score: dict[int, float] = {x_mask: h(instance.x)}
    heap: list[tuple[float, int, int]] = [(open_score[x_mask], 0, x_mask)]
    push_count = 0
    expansions = 0

    def push(mask: int, score: float):
        nonlocal push_count
        push_count += 1
        open_score[mask] = score
        heapq.heappush(heap, (score, -push_count, mask))

    while heap:
        score, _, mask = heapq.heappop(heap)
        if mask not in open_set or score != open_score[mask]:
            continue  # stale entry superseded by a cheaper push
        if expansions >= budget:
            return result("inconclusive", None, expansions)
        open_set.remove(mask)
        closed_set.add(mask)
        expansions += 1
        if mask == y_mask:
            chain = [mask]
            while chain[-1] != x_mask:
                chain.append(parent[chain[-1]])
            steps = [Subset.from_mask(n, m) for m in reversed(chain)]
            return result("found", ReconfigSequence(steps), expansions)
        g_here = g_score[mask]
        for t in neighbors(rule, Subset.from_mask(n, mask)):
            if not feasible(t):
                continue
            t_mask = t.mask
            tentative = g_here + 1
            if t_mask in open_set:
                if tentative < g_score[t_mask]:
                    g_score[t_mask] = tentative
                    parent[t_mask] = mask
                    push(t_mask, tentative + h(t))
            elif t_mask in closed_set:
                if tentative < g_score[t_mask]:
                    g_score[t_mask] = tentative
                    parent[t_mask] = mask
                    closed_set.remove(t_mask)
                    open_set.add(t_mask)
                    push(t_mask, tentative + h(t))
            else:
                g_score[t_mask] = tentative
                parent[t_mask] = mask
                open_set.add(t_mask)
                push(t_mask, tentative + h(t))
    return result("no_path", None, expansions)
