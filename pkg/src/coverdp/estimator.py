"""End-to-end private estimation of a black-box statistic.

Given a declared finite output grid and a privacy budget, the planner picks
the removal tolerance the mechanism needs, builds a covering design at a
chosen point on the oracle-vs-data tradeoff, and the estimator then runs the
oracle phase (exactly k black-box calls) followed by the selected
shifted-inverse flavor.  The report carries the sandwich endpoints, the
minimum and maximum of the cached values, between which the output falls
with probability at least 1 - beta.

Caller contracts: the grid is declared up front, never inferred from
observed outputs, and the black box must not depend on the order of its
input (the experiment harness reshuffles data across trials to surface
violations).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .data import Dataset, size
from .designs import (
    CoveringDesign,
    generate_chunked,
    generate_complete,
    generate_partition,
    generate_random,
    generate_single,
)
from .losses import OracleCache, OracleCounter, OutputGrid, build_cache
from .mechanisms import NoiseSource, PrivacyBudget
from .shifted_inverse import (
    ShiftedInverseResult,
    removal_tolerance_pure,
    removal_tolerance_zcdp,
    shifted_inverse_pure,
    shifted_inverse_zcdp,
)


class InfeasiblePlanError(ValueError):
    """The requested n cannot accommodate the required removal tolerance."""

    def __init__(self, message: str, minimal_n: int):
        super().__init__(f"{message} (minimal feasible n: {minimal_n})")
        self.minimal_n = minimal_n


@dataclass(frozen=True)
class PlanChoice:
    """A point on the oracle-vs-data tradeoff.

    partition: disjoint chunks, k = t + 1, data per call n / (t + 1).
    c_over_t(c): chunked complete design, k <= binom(t + c, c), data per
        call c * n / (t + c).
    additive(c): random patched design with m = c * t, data per call n - c*t.
    explicit(m): caller-specified m; complete design when m = t, single set
        when m = n, random patched design otherwise.
    """

    kind: str
    c: int | None = None
    m: int | None = None

    def __post_init__(self):
        if self.kind not in ("partition", "c_over_t", "additive", "explicit"):
            raise ValueError(f"unknown plan kind {self.kind!r}")
        if self.kind in ("c_over_t", "additive") and (self.c is None or self.c < 1):
            raise ValueError(f"{self.kind} needs an integer c >= 1")
        if self.kind == "explicit" and (self.m is None or self.m < 0):
            raise ValueError("explicit needs a nonnegative m")

    @classmethod
    def partition(cls) -> "PlanChoice":
        return cls(kind="partition")

    @classmethod
    def c_over_t(cls, c: int) -> "PlanChoice":
        return cls(kind="c_over_t", c=c)

    @classmethod
    def additive(cls, c: int) -> "PlanChoice":
        return cls(kind="additive", c=c)

    @classmethod
    def explicit(cls, m: int) -> "PlanChoice":
        return cls(kind="explicit", m=m)

    @classmethod
    def from_dict(cls, obj: dict) -> "PlanChoice":
        return cls(kind=obj["kind"], c=obj.get("c"), m=obj.get("m"))


@dataclass(frozen=True)
class EstimatePlan:
    n: int
    m: int
    t: int
    k: int
    design: CoveringDesign
    grid: OutputGrid
    budget: PrivacyBudget

    def __post_init__(self):
        if not (self.n >= self.m >= self.t):
            raise ValueError(f"need n >= m >= t, got {self.n} >= {self.m} >= {self.t}")
        d = self.design
        if (d.n, d.m, d.t, d.k) != (self.n, self.m, self.t, self.k):
            raise ValueError("design parameters disagree with the plan")
        needed = removal_tolerance(self.budget, len(self.grid))
        if self.t < needed:
            raise ValueError(
                f"design tolerates t={self.t} removals but the budget requires {needed}"
            )

    @property
    def flavor(self) -> str:
        return self.budget.mechanism_flavor()

    @property
    def subset_size(self) -> int:
        return self.n - self.m


@dataclass(frozen=True)
class EstimateReport:
    y: float
    oracle_calls: int
    sandwich_lo: float
    sandwich_hi: float
    seed: int
    t_used: int
    flavor: str

    def __post_init__(self):
        if self.sandwich_lo > self.sandwich_hi:
            raise ValueError("sandwich endpoints out of order")

    @property
    def sandwich_holds(self) -> bool:
        return self.sandwich_lo <= self.y <= self.sandwich_hi


def removal_tolerance(budget: PrivacyBudget, grid_size: int) -> int:
    """Removals the mechanism serving this budget may charge."""
    if budget.flavor == "pure":
        return removal_tolerance_pure(budget.epsilon, budget.beta, grid_size)
    return removal_tolerance_zcdp(budget.effective_rho(), budget.beta, grid_size)


def _minimal_n(t: int, choice: PlanChoice) -> int:
    if choice.kind == "partition":
        return t + 1
    if choice.kind == "c_over_t":
        return t + choice.c
    if choice.kind == "additive":
        return choice.c * t
    return max(choice.m, t)


def plan_tradeoff(
    n: int,
    grid: OutputGrid,
    budget: PrivacyBudget,
    choice: PlanChoice,
    *,
    rng_seed: int = 0,
    cover_fail_prob: float = 0.1,
) -> EstimatePlan:
    """Build a feasible plan for ``n`` data points at the chosen tradeoff.

    The removal tolerance is fixed by the budget and grid size first, then
    the design construction follows the choice.  Raises
    :class:`InfeasiblePlanError` with the minimal workable n when the
    requested n is too small or violates a divisibility requirement.
    """
    t = removal_tolerance(budget, len(grid))

    if choice.kind == "partition":
        if n < t + 1 or n % (t + 1) != 0:
            raise InfeasiblePlanError(
                f"partition plan needs n divisible by t + 1 = {t + 1}, got n={n}", t + 1
            )
        design = generate_partition(n, t)
    elif choice.kind == "c_over_t":
        base_n = t + choice.c
        if n < base_n or n % base_n != 0:
            raise InfeasiblePlanError(
                f"c_over_t({choice.c}) plan needs n divisible by t + c = {base_n}, got n={n}",
                base_n,
            )
        design = generate_chunked(generate_complete(base_n, t), n // base_n)
    elif choice.kind == "additive":
        m = choice.c * t
        if n < m:
            raise InfeasiblePlanError(
                f"additive({choice.c}) plan needs n >= c * t = {m}, got n={n}", m
            )
        design = _explicit_design(n, m, t, rng_seed, cover_fail_prob)
    else:
        m = choice.m
        if not (n >= m >= t):
            raise InfeasiblePlanError(
                f"explicit plan needs n >= m >= t, got n={n} m={m} t={t}", _minimal_n(t, choice)
            )
        design = _explicit_design(n, m, t, rng_seed, cover_fail_prob)

    return EstimatePlan(
        n=n, m=design.m, t=t, k=design.k, design=design, grid=grid, budget=budget
    )


def _explicit_design(n, m, t, rng_seed, cover_fail_prob) -> CoveringDesign:
    if m == n:
        return generate_single(n, t)
    if m == t:
        return generate_complete(n, t)
    return generate_random(n, m, t, rng_seed, cover_fail_prob)


def estimate(
    f: Callable[[Sequence], float],
    x: Dataset,
    plan: EstimatePlan,
    rng: NoiseSource,
    *,
    concurrency_safe: bool = False,
) -> EstimateReport:
    """Run the full pipeline: oracle phase, then the planned private inversion.

    Evaluates ``f`` exactly k times, on the complement of each design set,
    and never again afterwards.  The input must be full (no nulls) and of
    length n.  ``f`` must return values on the declared grid; anything else
    is rejected because the grid is the declared codomain.
    """
    if x.n != plan.n:
        raise ValueError(f"plan expects n={plan.n}, dataset has length {x.n}")
    if size(x) != plan.n:
        raise ValueError("input must be full: no null entries")

    counter = f if isinstance(f, OracleCounter) else OracleCounter(f)
    calls_before = counter.calls
    cache = build_cache(counter, x, plan.design, plan.grid, concurrency_safe=concurrency_safe)
    if counter.calls - calls_before != plan.k:
        raise RuntimeError(
            f"oracle phase made {counter.calls - calls_before} calls, expected k={plan.k}"
        )
    result = _run_flavor(cache, plan.budget, rng)
    if counter.calls - calls_before != plan.k:
        raise RuntimeError("mechanism touched the black box after the oracle phase")
    return EstimateReport(
        y=result.y,
        oracle_calls=cache.oracle_calls,
        sandwich_lo=min(cache.values),
        sandwich_hi=max(cache.values),
        seed=rng.seed,
        t_used=result.t_used,
        flavor=result.flavor,
    )


def _run_flavor(
    cache: OracleCache, budget: PrivacyBudget, rng: NoiseSource
) -> ShiftedInverseResult:
    if budget.flavor == "pure":
        return shifted_inverse_pure(cache, budget.epsilon, budget.beta, rng)
    return shifted_inverse_zcdp(cache, budget.effective_rho(), budget.beta, rng)
