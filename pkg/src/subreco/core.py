"""Ground-set subsets, set-function oracles, adjacency rules, and sequence checks.

Conventions used throughout the package: a ground set of ``n`` elements carries
ids ``0..n-1``, a set function assigns a real value to every subset, and a
reconfiguration sequence is a walk over subsets whose consecutive entries
differ by a single elementary move (an exchange, an addition, or a removal).
The value of a sequence is the minimum function value among its entries.

Subsets are immutable bit-vector values so that search frontiers can hash and
compare millions of them cheaply.  External text form is ``{i1,i2,...}`` with
ascending 0-indexed ids.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Iterator, Optional, Sequence

VALUE_SLACK = 1e-9
CHECK_TOL = 1e-9
EXHAUSTIVE_LIMIT = 16


class UniverseMismatchError(ValueError):
    """A subset was used with an oracle or subset over a different ground set."""


class OracleDomainError(ValueError):
    """A query touched elements that are outside the oracle's domain."""


class BudgetExceededError(RuntimeError):
    """An enumeration would exceed its configured size guard."""


@dataclass(frozen=True)
class GroundSet:
    """Ground set of ``n`` elements with ids ``0..n-1``."""

    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"ground set size must be nonnegative, got {self.n}")


class Subset:
    """Immutable subset of a ground set, stored as a bitmask.

    Equality is extensional and includes the universe size; subsets over
    different universes never compare equal and mixing them raises
    :class:`UniverseMismatchError`.
    """

    __slots__ = ("mask", "n")

    def __init__(self, n: int, members: Iterable[int] = ()):
        mask = 0
        for e in members:
            if not 0 <= e < n:
                raise UniverseMismatchError(f"element {e} outside universe of size {n}")
            mask |= 1 << e
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "Subset":
        if mask < 0 or mask >> n:
            raise UniverseMismatchError(f"mask {mask:#x} outside universe of size {n}")
        s = cls.__new__(cls)
        object.__setattr__(s, "n", n)
        object.__setattr__(s, "mask", mask)
        return s

    @classmethod
    def empty(cls, n: int) -> "Subset":
        return cls.from_mask(n, 0)

    @classmethod
    def full(cls, n: int) -> "Subset":
        return cls.from_mask(n, (1 << n) - 1)

    def __setattr__(self, name, value):
        raise AttributeError("Subset is immutable")

    # -- container protocol -------------------------------------------------

    def __contains__(self, e: int) -> bool:
        return 0 <= e < self.n and bool(self.mask >> e & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[int]:
        m = self.mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def members(self) -> tuple[int, ...]:
        return tuple(self)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subset)
            and self.mask == other.mask
            and self.n == other.n
        )

    def __hash__(self) -> int:
        return hash((self.mask, self.n))

    # -- set algebra --------------------------------------------------------

    def _check(self, other: "Subset") -> None:
        if self.n != other.n:
            raise UniverseMismatchError(
                f"universe sizes differ: {self.n} vs {other.n}"
            )

    def __or__(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset.from_mask(self.n, self.mask | other.mask)

    def __and__(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset.from_mask(self.n, self.mask & other.mask)

    def __sub__(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset.from_mask(self.n, self.mask & ~other.mask)

    def __xor__(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset.from_mask(self.n, self.mask ^ other.mask)

    def add(self, e: int) -> "Subset":
        if not 0 <= e < self.n:
            raise UniverseMismatchError(f"element {e} outside universe of size {self.n}")
        return Subset.from_mask(self.n, self.mask | 1 << e)

    def remove(self, e: int) -> "Subset":
        if e not in self:
            raise KeyError(e)
        return Subset.from_mask(self.n, self.mask ^ 1 << e)

    def issubset(self, other: "Subset") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def isdisjoint(self, other: "Subset") -> bool:
        self._check(other)
        return self.mask & other.mask == 0

    def __repr__(self) -> str:
        return f"Subset({self.n}, {{{','.join(str(e) for e in self)}}})"

    def __str__(self) -> str:
        return "{" + ",".join(str(e) for e in self) + "}"


def parse_subset(text: str, n: int) -> Subset:
    """Parse the ``{i1,i2,...}`` textual form (0-indexed ids)."""
    body = text.strip()
    if body.startswith("{") and body.endswith("}"):
        body = body[1:-1]
    body = body.strip()
    if not body:
        return Subset.empty(n)
    return Subset(n, (int(tok) for tok in body.replace(",", " ").split()))


class AdjacencyRule(Enum):
    """Elementary move allowed between consecutive sets of a sequence.

    TJ exchanges one element for another (sizes preserved), TAR adds or
    removes a single element, TJAR allows either move.
    """

    TJ = "tj"
    TAR = "tar"
    TJAR = "tjar"

    @classmethod
    def parse(cls, token: str) -> "AdjacencyRule":
        try:
            return cls(token.strip().lower())
        except ValueError:
            raise ValueError(f"unknown adjacency rule {token!r}") from None

    @property
    def token(self) -> str:
        return self.value


class SetFunctionOracle:
    """Deterministic set function with call accounting.

    The wrapped function must return identical values for identical subsets;
    randomized constructions have to be frozen before being wrapped.  The call
    counter increases by one per completed evaluation and is safe against
    concurrent use (its value is only meaningful at quiescence).

    ``claims_*`` flags are declarations by the constructor, not verified
    facts; :func:`check_submodular` and :func:`check_monotone` test them.
    """

    def __init__(
        self,
        fn: Callable[[Subset], float],
        universe: GroundSet,
        *,
        claims_monotone: bool = False,
        claims_submodular: bool = False,
        claims_nonnegative: bool = False,
        name: str = "",
        serial: Optional[tuple] = None,
    ):
        self._fn = fn
        self.universe = universe
        self.claims_monotone = claims_monotone
        self.claims_submodular = claims_submodular
        self.claims_nonnegative = claims_nonnegative
        self.name = name
        self.serial = serial  # optional (kind, payload) used by file writers
        self._calls = 0
        self._lock = threading.Lock()

    @property
    def calls(self) -> int:
        return self._calls

    def evaluate(self, s: Subset) -> float:
        if s.n != self.universe.n:
            raise UniverseMismatchError(
                f"subset over universe {s.n} queried on oracle over {self.universe.n}"
            )
        value = self._fn(s)
        if self.claims_nonnegative:
            assert value >= -1e-12, f"nonnegative oracle returned {value} on {s}"
        with self._lock:
            self._calls += 1
        return value

    def __repr__(self) -> str:
        flags = "".join(
            t
            for t, on in (
                ("M", self.claims_monotone),
                ("S", self.claims_submodular),
                ("N", self.claims_nonnegative),
            )
            if on
        )
        return f"SetFunctionOracle(n={self.universe.n}, flags={flags!r}, name={self.name!r})"


def evaluate(oracle: SetFunctionOracle, s: Subset) -> float:
    """Evaluate ``f(S)``, incrementing the oracle's call counter by one."""
    return oracle.evaluate(s)


def residual(oracle: SetFunctionOracle, r: Subset) -> SetFunctionOracle:
    """Residual function ``S -> f(S + R) - f(R)`` on the ground set minus R.

    The returned oracle keeps the original index space and masks R: queries
    intersecting R raise :class:`OracleDomainError`.  Monotonicity and
    submodularity are preserved, so the claim flags propagate.  Construction
    costs one evaluation of the base oracle (for ``f(R)``).
    """
    if r.n != oracle.universe.n:
        raise UniverseMismatchError("residual base set over wrong universe")
    n = oracle.universe.n
    offset = oracle.evaluate(r)
    r_mask = r.mask

    def fn(s: Subset) -> float:
        if s.mask & r_mask:
            raise OracleDomainError(
                f"residual query {s} intersects masked set {r}"
            )
        return oracle.evaluate(Subset.from_mask(n, s.mask | r_mask)) - offset

    return SetFunctionOracle(
        fn,
        oracle.universe,
        claims_monotone=oracle.claims_monotone,
        claims_submodular=oracle.claims_submodular,
        # residual of a monotone function is nonnegative by definition
        claims_nonnegative=oracle.claims_monotone,
        name=f"residual({oracle.name or 'f'}, {r})",
    )


def total_curvature(oracle: SetFunctionOracle) -> float:
    """Total curvature ``1 - min_e (f([n]) - f([n]-e)) / f({e})`` in [0, 1].

    Measures how far the function is from modular: 0 for modular functions,
    up to 1 (coverage functions attain 1).  Elements with ``f({e}) = 0``
    contribute ratio 1 (monotonicity pins their top marginal to 0, so the
    ratio is 0/0 and must not inflate the curvature).  Uses exactly ``2n + 1``
    evaluations.
    """
    if not (oracle.claims_monotone and oracle.claims_nonnegative):
        raise ValueError("total curvature needs a monotone nonnegative oracle")
    n = oracle.universe.n
    full = Subset.full(n)
    f_full = oracle.evaluate(full)
    worst = 1.0
    for e in range(n):
        f_drop = oracle.evaluate(full.remove(e))
        f_single = oracle.evaluate(Subset.from_mask(n, 1 << e))
        if f_single != 0.0:
            ratio = (f_full - f_drop) / f_single
            if ratio < worst:
                worst = ratio
    return min(1.0, max(0.0, 1.0 - worst))


def modular_upper_bound(oracle: SetFunctionOracle, r: Subset) -> SetFunctionOracle:
    """Modular bound ``S -> sum_{e in S} (f({e} + R) - f(R))`` masking R.

    For a monotone submodular oracle with curvature ``kappa`` this sandwiches
    the residual: ``(1 - kappa) * bound(S) <= residual(S) <= bound(S)``.
    Singleton residual values are evaluated eagerly, so construction costs
    ``n - |R| + 1`` base evaluations and later queries are free.
    """
    if not (oracle.claims_monotone and oracle.claims_submodular):
        raise ValueError("modular upper bound needs a monotone submodular oracle")
    res = residual(oracle, r)
    n = oracle.universe.n
    r_mask = r.mask
    weights = {}
    for e in range(n):
        if not r_mask >> e & 1:
            weights[e] = res.evaluate(Subset.from_mask(n, 1 << e))

    def fn(s: Subset) -> float:
        if s.mask & r_mask:
            raise OracleDomainError(
                f"modular bound query {s} intersects masked set {r}"
            )
        return sum(weights[e] for e in s)

    return SetFunctionOracle(
        fn,
        oracle.universe,
        claims_monotone=oracle.claims_monotone,
        claims_submodular=True,
        claims_nonnegative=oracle.claims_monotone,
        name=f"modular_bound({oracle.name or 'f'}, {r})",
        serial=("modular", tuple(weights.get(e, 0.0) for e in range(n))),
    )


class ReconfigSequence:
    """Ordered sequence of subsets ``S(0)..S(l)``; its length is ``l``."""

    __slots__ = ("steps",)

    def __init__(self, steps: Sequence[Subset]):
        steps = tuple(steps)
        if not steps:
            raise ValueError("a reconfiguration sequence holds at least one subset")
        n = steps[0].n
        for s in steps:
            if s.n != n:
                raise UniverseMismatchError("sequence mixes universes")
        object.__setattr__(self, "steps", steps)

    def __setattr__(self, name, value):
        raise AttributeError("ReconfigSequence is immutable")

    @property
    def length(self) -> int:
        return len(self.steps) - 1

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[Subset]:
        return iter(self.steps)

    def __getitem__(self, i: int) -> Subset:
        return self.steps[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, ReconfigSequence) and self.steps == other.steps

    def __hash__(self) -> int:
        return hash(self.steps)

    def __repr__(self) -> str:
        return "<" + ", ".join(str(s) for s in self.steps) + ">"


def sequence_value(oracle: SetFunctionOracle, seq: ReconfigSequence) -> float:
    """Minimum function value over all steps; duplicates are re-evaluated."""
    if len(seq) == 0:  # unreachable via the constructor; defensive
        raise ValueError("empty sequence has no value")
    return min(oracle.evaluate(s) for s in seq)


@dataclass(frozen=True)
class ProblemInstance:
    """A reconfiguration task: transform X into Y under a rule.

    ``theta`` (optional) is the feasibility threshold every step must meet;
    ``cardinality_k`` (optional) pins all steps to a fixed size and requires
    the TJ rule.  The standing assumption ``theta <= min(f(X), f(Y))`` is not
    checked at construction (it would evaluate the oracle); solvers enforce it
    behaviorally by rejecting infeasible endpoints.
    """

    oracle: SetFunctionOracle
    x: Subset
    y: Subset
    rule: AdjacencyRule
    theta: Optional[float] = None
    cardinality_k: Optional[int] = None

    def __post_init__(self):
        n = self.oracle.universe.n
        if self.x.n != n or self.y.n != n:
            raise UniverseMismatchError("endpoints over wrong universe")
        if self.cardinality_k is not None:
            if self.rule is not AdjacencyRule.TJ:
                raise ValueError("fixed-cardinality instances use the TJ rule")
            if len(self.x) != self.cardinality_k or len(self.y) != self.cardinality_k:
                raise ValueError(
                    f"endpoints must have size {self.cardinality_k}, "
                    f"got {len(self.x)} and {len(self.y)}"
                )


def is_adjacent(rule: AdjacencyRule, s: Subset, t: Subset) -> bool:
    """True when a single step under ``rule`` transforms S into T."""
    s._check(t)
    diff = (s.mask ^ t.mask).bit_count()
    if rule is AdjacencyRule.TJ:
        return diff == 2 and len(s) == len(t)
    if rule is AdjacencyRule.TAR:
        return diff == 1
    return diff == 1 or (diff == 2 and len(s) == len(t))


def neighbors(rule: AdjacencyRule, s: Subset) -> list[Subset]:
    """All subsets adjacent to S, in a fixed deterministic order.

    Removals come first (ascending removed id), then additions (ascending
    added id), then exchanges ordered by (removed id, added id).  A fixed
    order keeps searches that break ties by insertion bit-reproducible.
    """
    n = s.n
    mask = s.mask
    out: list[Subset] = []
    if rule is not AdjacencyRule.TJ:
        for e in range(n):
            if mask >> e & 1:
                out.append(Subset.from_mask(n, mask ^ 1 << e))
        for e in range(n):
            if not mask >> e & 1:
                out.append(Subset.from_mask(n, mask | 1 << e))
    if rule is not AdjacencyRule.TAR:
        for e in range(n):
            if mask >> e & 1:
                removed = mask ^ 1 << e
                for g in range(n):
                    if not mask >> g & 1:
                        out.append(Subset.from_mask(n, removed | 1 << g))
    return out


@dataclass(frozen=True)
class SequenceVerdict:
    """Outcome of validating a sequence; falsy iff some check failed."""

    ok: bool
    reason: Optional[str] = None
    index: Optional[int] = None

    def __bool__(self) -> bool:
        return self.ok


_OK = SequenceVerdict(True)


def validate_sequence(
    instance: ProblemInstance,
    seq: ReconfigSequence,
    *,
    value_slack: float = VALUE_SLACK,
) -> SequenceVerdict:
    """Check endpoints, adjacency, cardinality, and threshold feasibility.

    Violations are reported as verdicts (never raised) and pinpoint the first
    offending step index.  Threshold comparisons allow ``value_slack`` of
    floating-point leeway; pass 0 for exact-valued oracles.
    """
    steps = seq.steps
    if steps[0].n != instance.oracle.universe.n:
        return SequenceVerdict(False, "sequence universe differs from instance", 0)
    if steps[0] != instance.x:
        return SequenceVerdict(False, f"first step {steps[0]} is not X", 0)
    if steps[-1] != instance.y:
        return SequenceVerdict(False, f"last step {steps[-1]} is not Y", len(steps) - 1)
    k = instance.cardinality_k
    if k is not None:
        for i, s in enumerate(steps):
            if len(s) != k:
                return SequenceVerdict(False, f"step {s} has size {len(s)}, not {k}", i)
    for i in range(1, len(steps)):
        if not is_adjacent(instance.rule, steps[i - 1], steps[i]):
            return SequenceVerdict(
                False,
                f"steps {steps[i - 1]} and {steps[i]} are not adjacent under "
                f"{instance.rule.token}",
                i,
            )
    if instance.theta is not None:
        bound = instance.theta - value_slack
        for i, s in enumerate(steps):
            if instance.oracle.evaluate(s) < bound:
                return SequenceVerdict(
                    False, f"step {s} falls below threshold {instance.theta}", i
                )
    return _OK


@dataclass(frozen=True)
class CheckVerdict:
    """Outcome of a structural oracle check; carries a counterexample if any."""

    ok: bool
    witness: tuple = ()
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _value_table(oracle: SetFunctionOracle) -> list[float]:
    n = oracle.universe.n
    return [oracle.evaluate(Subset.from_mask(n, m)) for m in range(1 << n)]


def check_submodular(
    oracle: SetFunctionOracle,
    mode: str = "exhaustive",
    sample_count: int = 1000,
    seed: int = 0,
    tol: float = CHECK_TOL,
) -> CheckVerdict:
    """Test the diminishing-returns inequality, exhaustively or by sampling.

    The exhaustive mode tabulates the whole lattice (guarded at n <= 16) and
    checks every triple (S, e, g) with e, g outside S:
    ``f(S+e) - f(S) >= f(S+g+e) - f(S+g)``.  Chaining these immediate-cover
    inequalities is equivalent to diminishing returns for arbitrary S <= T.
    Sampled mode draws random (S <= T, e) triples instead.
    """
    n = oracle.universe.n
    if mode == "exhaustive":
        if n > EXHAUSTIVE_LIMIT:
            raise BudgetExceededError(
                f"exhaustive submodularity check refused for n={n} > {EXHAUSTIVE_LIMIT}"
            )
        table = _value_table(oracle)
        for s_mask in range(1 << n):
            free = [e for e in range(n) if not s_mask >> e & 1]
            base = table[s_mask]
            for ai in range(len(free)):
                e = free[ai]
                with_e = table[s_mask | 1 << e]
                for g in free[ai + 1 :]:
                    with_g = table[s_mask | 1 << g]
                    with_both = table[s_mask | 1 << e | 1 << g]
                    if (with_e - base) - (with_both - with_g) < -tol:
                        return CheckVerdict(
                            False,
                            (
                                Subset.from_mask(n, s_mask),
                                Subset.from_mask(n, s_mask | 1 << g),
                                e,
                            ),
                            f"gain of {e} grows when {g} is added",
                        )
        return CheckVerdict(True)
    if mode != "sampled":
        raise ValueError(f"unknown check mode {mode!r}")
    rng = random.Random(seed)
    mask_all = (1 << n) - 1
    for _ in range(sample_count):
        t_mask = rng.getrandbits(n) if n else 0
        if t_mask == mask_all:
            continue
        s_mask = t_mask & (rng.getrandbits(n) if n else 0)
        free = [e for e in range(n) if not t_mask >> e & 1]
        e = rng.choice(free)
        gain_small = oracle.evaluate(
            Subset.from_mask(n, s_mask | 1 << e)
        ) - oracle.evaluate(Subset.from_mask(n, s_mask))
        gain_large = oracle.evaluate(
            Subset.from_mask(n, t_mask | 1 << e)
        ) - oracle.evaluate(Subset.from_mask(n, t_mask))
        if gain_small - gain_large < -tol:
            return CheckVerdict(
                False,
                (Subset.from_mask(n, s_mask), Subset.from_mask(n, t_mask), e),
                f"gain of {e} grows from S to T",
            )
    return CheckVerdict(True)


def check_monotone(
    oracle: SetFunctionOracle,
    mode: str = "exhaustive",
    sample_count: int = 1000,
    seed: int = 0,
    tol: float = CHECK_TOL,
) -> CheckVerdict:
    """Test ``f(S) <= f(S + e)`` for all (S, e), exhaustively or by sampling."""
    n = oracle.universe.n
    if mode == "exhaustive":
        if n > EXHAUSTIVE_LIMIT:
            raise BudgetExceededError(
                f"exhaustive monotonicity check refused for n={n} > {EXHAUSTIVE_LIMIT}"
            )
        table = _value_table(oracle)
        for s_mask in range(1 << n):
            base = table[s_mask]
            for e in range(n):
                if not s_mask >> e & 1 and table[s_mask | 1 << e] < base - tol:
                    return CheckVerdict(
                        False,
                        (Subset.from_mask(n, s_mask), Subset.from_mask(n, s_mask | 1 << e)),
                        f"adding {e} decreases the value",
                    )
        return CheckVerdict(True)
    if mode != "sampled":
        raise ValueError(f"unknown check mode {mode!r}")
    rng = random.Random(seed)
    for _ in range(sample_count):
        s_mask = rng.getrandbits(n) if n else 0
        free = [e for e in range(n) if not s_mask >> e & 1]
        if not free:
            continue
        e = rng.choice(free)
        if oracle.evaluate(Subset.from_mask(n, s_mask | 1 << e)) < oracle.evaluate(
            Subset.from_mask(n, s_mask)
        ) - tol:
            return CheckVerdict(
                False,
                (Subset.from_mask(n, s_mask), Subset.from_mask(n, s_mask | 1 << e)),
                f"adding {e} decreases the value",
            )
    return CheckVerdict(True)
