"""Experiment orchestration: build instances, run one algorithm, report.

The runner keeps oracle-call accounting honest by snapshotting the counter
around each phase: setup (ingestion, endpoint construction, threshold
resolution), the algorithm itself, and the final per-step evaluation that
fills the CSV rows.  Reported counts are exact and reproducible because every
randomized ingredient takes an explicit seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .algorithms import AstarConfig, astar, swap_reconfigure, tjar_reconfigure
from .core import (
    AdjacencyRule,
    ProblemInstance,
    ReconfigSequence,
    SetFunctionOracle,
    Subset,
    validate_sequence,
)
from .exact import optimal_sequence
from .fileio import (
    InstanceFile,
    format_ids_1indexed,
    load_edge_list,
    load_gram,
    load_instance,
)
from .oracles import GramMatrix, influence_oracle, logdet_oracle, sample_rr_sets
from .reductions import obs52_instance, obs54_instance, obs55_instance

PathLike = Union[str, Path]


def interchangeable_greedy(
    f: SetFunctionOracle, k: int
) -> tuple[Subset, Subset]:
    """Grow two disjoint size-k sets by alternating greedy picks.

    Round ``i`` first extends X with the best element outside both partial
    sets, then extends Y with the best element outside both (including X's
    fresh pick).  Ties go to the smallest id.  Needs ``2k <= n``.
    """
    n = f.universe.n
    if not 0 <= k or 2 * k > n:
        raise ValueError(f"need 2k <= n to build disjoint endpoints, got k={k}, n={n}")
    x_mask = 0
    y_mask = 0

    def best_extension(base_mask: int, taken_mask: int) -> int:
        best_e = -1
        best_v = 0.0
        for e in range(n):
            if taken_mask >> e & 1:
                continue
            v = f.evaluate(Subset.from_mask(n, base_mask | 1 << e))
            if best_e < 0 or v > best_v:
                best_e, best_v = e, v
        return best_e

    for _ in range(k):
        e = best_extension(x_mask, x_mask | y_mask)
        x_mask |= 1 << e
        e = best_extension(y_mask, x_mask | y_mask)
        y_mask |= 1 << e
    return Subset.from_mask(n, x_mask), Subset.from_mask(n, y_mask)


def make_synthetic_gram(
    n: int,
    seed: int,
    eig_low: float = 1.3,
    eig_high: float = 3.0,
) -> GramMatrix:
    """Random symmetric matrix with eigenvalues spread over [eig_low, eig_high].

    With ``eig_low >= 1`` every principal minor has determinant at least 1,
    so the log-determinant objective is nonnegative and monotone; that keeps
    threshold search on such instances well behaved while the off-diagonal
    structure still makes subset choice matter.
    """
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    eigs = np.linspace(eig_low, eig_high, n)
    a = (q * eigs) @ q.T
    return GramMatrix((a + a.T) / 2.0)


@dataclass
class ExperimentConfig:
    """What to run and on what.

    Exactly one instance source applies: an in-memory instance, an instance
    file path, a named generator, an edge list (influence experiment), or a
    gram matrix (determinant experiment).  The last two build endpoints with
    :func:`interchangeable_greedy` and require ``k``; the influence path also
    requires an explicit ``seed``.
    """

    algorithm: str
    instance: Optional[Union[ProblemInstance, InstanceFile, str, Path]] = None
    generator: Optional[str] = None
    generator_arg: Optional[int] = None
    graph_path: Optional[PathLike] = None
    gram_path: Optional[PathLike] = None
    directed: bool = False
    probability_mode: str = "inverse-in-degree"
    rr_count: int = 100_000
    seed: Optional[int] = None
    k: Optional[int] = None
    rule: Optional[AdjacencyRule] = None
    theta: Optional[float] = None
    theta_frac: Optional[float] = None
    out: Optional[PathLike] = None
    budget: Optional[int] = None
    restriction: Optional[Subset] = None


@dataclass
class Report:
    """Outcome of one run, including the per-phase oracle-call split."""

    algorithm: str
    rule: AdjacencyRule
    theta: Optional[float]
    status: str
    rows: list[tuple[int, Subset, float]]
    value: Optional[float]
    length: Optional[int]
    endpoint_values: tuple[float, float]
    calls_setup: int
    calls_algorithm: int
    calls_evaluation: int
    expansions: Optional[int] = None
    csv_path: Optional[Path] = None

    @property
    def calls_total(self) -> int:
        return self.calls_algorithm + self.calls_evaluation

    def summary(self) -> str:
        value = "-" if self.value is None else f"{self.value:.6g}"
        length = "-" if self.length is None else str(self.length)
        theta = "-" if self.theta is None else f"{self.theta:.6g}"
        return (
            f"algorithm={self.algorithm} rule={self.rule.token} status={self.status} "
            f"theta={theta} value={value} length={length} "
            f"calls_total={self.calls_total} calls_algorithm={self.calls_algorithm} "
            f"calls_evaluation={self.calls_evaluation}"
        )

    def write_csv(self, path: PathLike) -> None:
        path = Path(path)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "set", "value"])
            for index, subset, value in self.rows:
                writer.writerow([index, format_ids_1indexed(subset), repr(value)])
        self.csv_path = path


_GENERATORS = {
    "obs52": lambda arg: obs52_instance(),
    "obs54": lambda arg: obs54_instance(arg if arg is not None else 8),
    "obs55": lambda arg: obs55_instance(),
}


def _resolve_instance(cfg: ExperimentConfig) -> ProblemInstance:
    sources = [
        cfg.instance is not None,
        cfg.generator is not None,
        cfg.graph_path is not None,
        cfg.gram_path is not None,
    ]
    if sum(sources) != 1:
        raise ValueError("exactly one instance source must be set")

    if cfg.instance is not None:
        inst = cfg.instance
        if isinstance(inst, (str, Path)):
            inst = load_instance(inst)
        if isinstance(inst, InstanceFile):
            inst = inst.to_problem_instance()
        return inst

    if cfg.generator is not None:
        maker = _GENERATORS.get(cfg.generator)
        if maker is None:
            raise ValueError(f"unknown generator {cfg.generator!r}")
        return maker(cfg.generator_arg)

    if cfg.k is None:
        raise ValueError("endpoint construction needs k")

    if cfg.graph_path is not None:
        if cfg.seed is None:
            raise ValueError("influence experiments need an explicit seed")
        graph = load_edge_list(
            cfg.graph_path,
            directed=cfg.directed,
            probability_mode=cfg.probability_mode,
        )
        oracle = influence_oracle(sample_rr_sets(graph, cfg.rr_count, cfg.seed))
    else:
        oracle = logdet_oracle(load_gram(cfg.gram_path))

    x, y = interchangeable_greedy(oracle, cfg.k)
    rule = cfg.rule or (
        AdjacencyRule.TJ if cfg.graph_path is not None else AdjacencyRule.TJAR
    )
    k = cfg.k if rule is AdjacencyRule.TJ else None
    return ProblemInstance(oracle, x, y, rule, None, k)


def run_experiment(cfg: ExperimentConfig) -> Report:
    if cfg.algorithm not in ("swap", "tjar", "astar", "exact"):
        raise ValueError(f"unknown algorithm {cfg.algorithm!r}")
    calls_start_total = None
    instance = _resolve_instance(cfg)
    if cfg.rule is not None and cfg.rule is not instance.rule:
        k = len(instance.x) if cfg.rule is AdjacencyRule.TJ else None
        instance = ProblemInstance(
            instance.oracle, instance.x, instance.y, cfg.rule, instance.theta, k
        )
    f = instance.oracle
    calls_start_total = f.calls

    fx = f.evaluate(instance.x)
    fy = f.evaluate(instance.y)
    if cfg.theta is not None:
        theta = cfg.theta
    elif cfg.theta_frac is not None:
        theta = cfg.theta_frac * min(fx, fy)
    else:
        theta = instance.theta

    c0 = f.calls
    calls_setup = c0 - calls_start_total
    status = "ok"
    expansions = None
    value = None
    seq: Optional[ReconfigSequence] = None
    if cfg.algorithm == "swap":
        seq = swap_reconfigure(f, instance.x, instance.y)
    elif cfg.algorithm == "tjar":
        seq = tjar_reconfigure(f, instance.x, instance.y)
    elif cfg.algorithm == "astar":
        if theta is None:
            raise ValueError("astar needs --theta or --theta-frac")
        search_instance = ProblemInstance(
            f, instance.x, instance.y, instance.rule, theta, instance.cardinality_k
        )
        result = astar(search_instance, AstarConfig(budget=cfg.budget))
        status = result.status
        seq = result.sequence
        expansions = result.expansions
    else:
        value, seq = optimal_sequence(
            f,
            instance.x,
            instance.y,
            instance.rule,
            cardinality_k=instance.cardinality_k,
            restriction=cfg.restriction,
        )
        status = "found"
    c1 = f.calls

    rows: list[tuple[int, Subset, float]] = []
    length = None
    if seq is not None:
        for i, s in enumerate(seq):
            rows.append((i, s, f.evaluate(s)))
        value = min(r[2] for r in rows)
        length = seq.length
        check_instance = ProblemInstance(
            f, instance.x, instance.y, instance.rule, None, instance.cardinality_k
        )
        verdict = validate_sequence(check_instance, seq)
        if not verdict:
            raise RuntimeError(f"algorithm produced an invalid sequence: {verdict.reason}")
    c2 = f.calls

    report = Report(
        algorithm=cfg.algorithm,
        rule=instance.rule,
        theta=theta,
        status=status,
        rows=rows,
        value=value,
        length=length,
        endpoint_values=(fx, fy),
        calls_setup=calls_setup,
        calls_algorithm=c1 - c0,
        calls_evaluation=c2 - c1,
        expansions=expansions,
    )
    if cfg.out is not None and rows:
        report.write_csv(cfg.out)
    return report
