"""Reproducible experiment harness: accuracy runs, exact privacy audits, the
query-complexity adversary demo, and covering-design benchmarks.

Everything is seeded and emits one shared CSV schema.  Trial i derives its
randomness from ``base_seed + i``, so reruns with the same configuration
produce byte-identical CSV bodies; wall-clock timings and timestamps live in
comment lines above the header, never in the body.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from itertools import combinations, product
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .data import NULL, Dataset
from .designs import (
    CoveringDesign,
    EnumerationBudgetError,
    erdos_spencer_upper_bound,
    generate_partition,
    generate_random,
    schonheim_lower_bound,
    verify,
)
from .estimator import EstimatePlan, PlanChoice, estimate, plan_tradeoff
from .losses import OutputGrid, build_cache, loss_tables
from .mechanisms import (
    NoiseSource,
    PrivacyBudget,
    exponential_mechanism_distribution,
)
from .shifted_inverse import pure_shift

# ---------------------------------------------------------------------------
# statistics and data distributions

def _lower_median(values: Sequence[float]) -> float:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def make_statistic(name: str, grid: OutputGrid) -> Callable[[Sequence[float]], float]:
    """Named black-box statistic mapping into the declared grid.

    All statistics are total on tuples of any length; the empty tuple maps to
    the bottom grid point.  The median is the lower median, so it stays on
    the grid whenever the data does.  The trimmed mean drops a tenth from
    each tail and snaps to the nearest grid point.
    """
    if name == "median":

        def stat(values: Sequence[float]) -> float:
            return grid.min_point if len(values) == 0 else _lower_median(values)

    elif name == "trimmed_mean":

        def stat(values: Sequence[float]) -> float:
            if len(values) == 0:
                return grid.min_point
            ordered = sorted(values)
            cut = len(ordered) // 10
            kept = ordered[cut : len(ordered) - cut] or ordered
            return grid.snap(sum(kept) / len(kept))

    elif name == "max":

        def stat(values: Sequence[float]) -> float:
            return grid.min_point if len(values) == 0 else max(values)

    else:
        raise ValueError(f"unknown statistic {name!r}; choose median, trimmed_mean, or max")
    return stat


@dataclass(frozen=True)
class DistributionSpec:
    """Finite-support data distribution, so target functionals are exact.

    Kinds: ``uniform`` over the integers ``low..high``, ``point`` mass, and
    ``discretized_gaussian`` with weights proportional to the normal density
    on ``low..high``.
    """

    kind: str
    low: int | None = None
    high: int | None = None
    value: float | None = None
    mean: float | None = None
    stddev: float | None = None

    def __post_init__(self):
        if self.kind == "uniform":
            if self.low is None or self.high is None or self.low > self.high:
                raise ValueError("uniform needs low <= high")
        elif self.kind == "point":
            if self.value is None:
                raise ValueError("point needs a value")
        elif self.kind == "discretized_gaussian":
            if self.low is None or self.high is None or self.low > self.high:
                raise ValueError("discretized_gaussian needs low <= high")
            if self.mean is None or self.stddev is None or self.stddev <= 0:
                raise ValueError("discretized_gaussian needs mean and stddev > 0")
        else:
            raise ValueError(f"unknown distribution kind {self.kind!r}")

    @classmethod
    def from_dict(cls, obj: dict) -> "DistributionSpec":
        return cls(
            kind=obj["kind"],
            low=obj.get("low"),
            high=obj.get("high"),
            value=obj.get("value"),
            mean=obj.get("mean"),
            stddev=obj.get("stddev"),
        )

    def support(self) -> tuple[float, ...]:
        if self.kind == "point":
            return (float(self.value),)
        return tuple(float(v) for v in range(self.low, self.high + 1))

    def probabilities(self) -> np.ndarray:
        if self.kind == "point":
            return np.array([1.0])
        if self.kind == "uniform":
            width = self.high - self.low + 1
            return np.full(width, 1.0 / width)
        values = np.arange(self.low, self.high + 1, dtype=float)
        weights = np.exp(-0.5 * ((values - self.mean) / self.stddev) ** 2)
        return weights / weights.sum()

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        support = np.array(self.support())
        return gen.choice(support, size=size, p=self.probabilities())

    def median(self) -> float:
        support = self.support()
        cdf = np.cumsum(self.probabilities())
        return support[int(np.searchsorted(cdf, 0.5))]

    def mean_value(self) -> float:
        support = np.array(self.support())
        return float(support @ self.probabilities())


def _auto_target(distribution: DistributionSpec, statistic: str, grid: OutputGrid) -> float:
    if statistic == "median":
        return distribution.median()
    if statistic == "trimmed_mean":
        return grid.snap(distribution.mean_value())
    return max(distribution.support())


# ---------------------------------------------------------------------------
# CSV output

CSV_COLUMNS = (
    "experiment_id",
    "seed",
    "n",
    "m",
    "t",
    "k",
    "flavor",
    "epsilon_or_rho",
    "beta",
    "y",
    "nu",
    "abs_err",
    "sandwich_lo",
    "sandwich_hi",
    "sandwich_ok",
    "oracle_calls",
    "wall_ms",
)


def _format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return str(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)
    return str(value)


def render_csv(rows: Iterable[dict], comments: Sequence[str] = ()) -> str:
    """Comment lines, then the header, then one line per row.

    The body (header plus rows) is a pure function of the rows, so reruns
    from the same seed reproduce it byte for byte; anything time-dependent
    belongs in the comments.
    """
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(CSV_COLUMNS))
    for row in rows:
        lines.append(",".join(_format_cell(row.get(col)) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def write_csv(path, rows: Iterable[dict], comments: Sequence[str] = ()) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_csv(rows, comments))


def csv_body(text: str) -> str:
    """The reproducible part of a CSV file: everything except comments."""
    return "".join(ln for ln in text.splitlines(keepends=True) if not ln.startswith("#"))


def _base_row(**kwargs) -> dict:
    row = {col: None for col in CSV_COLUMNS}
    row["wall_ms"] = 0  # timings stay out of the body; see render_csv
    row.update(kwargs)
    return row


# ---------------------------------------------------------------------------
# statistical accuracy experiment

@dataclass(frozen=True)
class ExperimentConfig:
    """One accuracy experiment: distribution, statistic, plan, budget.

    ``nu`` is the target the statistic is supposed to estimate; ``None``
    derives it from the distribution (median, snapped mean, or support max).
    The grid defaults to the distribution's support.  ``beta`` from the
    budget is split evenly: half goes to the private mechanism, half is the
    allowance for the statistic itself missing on fresh data.
    """

    distribution: DistributionSpec
    statistic: str
    n: int
    trials: int
    seed: int
    plan_choice: PlanChoice
    budget: PrivacyBudget
    alpha: float
    nu: float | None = None
    grid_points: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("need at least one trial")
        grid = self.resolved_grid()
        for v in self.distribution.support():
            grid.index_of(v)  # support must live on the grid

    def resolved_grid(self) -> OutputGrid:
        if self.grid_points is not None:
            return OutputGrid(self.grid_points)
        return OutputGrid(self.distribution.support())

    def resolved_nu(self) -> float:
        if self.nu is not None:
            return float(self.nu)
        return _auto_target(self.distribution, self.statistic, self.resolved_grid())

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        nu = obj.get("nu")
        if nu == "auto":
            nu = None
        return cls(
            distribution=DistributionSpec.from_dict(obj["distribution"]),
            statistic=obj["statistic"],
            n=obj["n"],
            trials=obj["trials"],
            seed=obj.get("seed", 0),
            plan_choice=PlanChoice.from_dict(obj["plan"]),
            budget=budget_from_dict(obj["budget"]),
            alpha=float(obj["alpha"]),
            nu=nu,
            grid_points=tuple(obj["grid"]) if "grid" in obj else None,
        )


def budget_from_dict(obj: dict) -> PrivacyBudget:
    flavor = obj["flavor"]
    beta = float(obj["beta"])
    if flavor == "pure":
        return PrivacyBudget.pure(float(obj["epsilon"]), beta)
    if flavor == "approx":
        return PrivacyBudget.approx(float(obj["epsilon"]), float(obj["delta"]), beta)
    if flavor == "zcdp":
        return PrivacyBudget.zcdp(float(obj["rho"]), beta)
    raise ValueError(f"unknown budget flavor {flavor!r}")


@dataclass(frozen=True)
class StatisticalResult:
    rows: tuple[dict, ...]
    summary: dict
    plan: EstimatePlan


def build_experiment_plan(cfg: ExperimentConfig) -> EstimatePlan:
    grid = cfg.resolved_grid()
    mechanism_budget = replace(cfg.budget, beta=cfg.budget.beta / 2.0)
    return plan_tradeoff(cfg.n, grid, mechanism_budget, cfg.plan_choice, rng_seed=cfg.seed)


def run_statistical_experiment(cfg: ExperimentConfig) -> StatisticalResult:
    """Per trial: sample data, run the private estimate, score against nu.

    Each trial also evaluates the statistic once on a fresh sample of the
    per-call size as the non-private baseline.  Sampling data fresh per trial
    doubles as the order-shuffling probe for order-dependent statistics.
    """
    grid = cfg.resolved_grid()
    nu = cfg.resolved_nu()
    plan = build_experiment_plan(cfg)
    stat = make_statistic(cfg.statistic, grid)
    label = f"estimate:{cfg.plan_choice.kind}"

    rows: list[dict] = []
    sandwich_failures = 0
    estimate_errors: list[float] = []
    baseline_errors: list[float] = []
    started = time.perf_counter()
    for i in range(cfg.trials):
        trial_seed = cfg.seed + i
        gen = np.random.Generator(np.random.PCG64(trial_seed))
        x = Dataset.of(float(v) for v in cfg.distribution.sample(gen, cfg.n))
        report = estimate(stat, x, plan, NoiseSource(trial_seed))
        err = abs(report.y - nu)
        estimate_errors.append(err)
        sandwich_failures += 0 if report.sandwich_holds else 1
        rows.append(
            _base_row(
                experiment_id=label,
                seed=trial_seed,
                n=plan.n,
                m=plan.m,
                t=plan.t,
                k=plan.k,
                flavor=plan.flavor,
                epsilon_or_rho=cfg.budget.scale_label(),
                beta=cfg.budget.beta,
                y=report.y,
                nu=nu,
                abs_err=err,
                sandwich_lo=report.sandwich_lo,
                sandwich_hi=report.sandwich_hi,
                sandwich_ok=report.sandwich_holds,
                oracle_calls=report.oracle_calls,
            )
        )
        fresh = cfg.distribution.sample(gen, plan.subset_size)
        baseline = stat(tuple(float(v) for v in fresh))
        baseline_errors.append(abs(baseline - nu))
        rows.append(
            _base_row(
                experiment_id="baseline",
                seed=trial_seed,
                n=plan.subset_size,
                m=0,
                t=0,
                k=0,
                flavor="none",
                epsilon_or_rho=0,
                beta=cfg.budget.beta,
                y=baseline,
                nu=nu,
                abs_err=abs(baseline - nu),
                sandwich_ok=True,
                oracle_calls=1,
            )
        )
    wall_ms = (time.perf_counter() - started) * 1000.0

    est = np.array(estimate_errors)
    base = np.array(baseline_errors)
    beta_f_hat = float(np.mean(base > cfg.alpha))
    summary = {
        "label": label,
        "trials": cfg.trials,
        "nu": nu,
        "subset_size": plan.subset_size,
        "k": plan.k,
        "t": plan.t,
        "abs_err_q50": float(np.quantile(est, 0.5)),
        "abs_err_q90": float(np.quantile(est, 0.9)),
        "baseline_q50": float(np.quantile(base, 0.5)),
        "baseline_q90": float(np.quantile(base, 0.9)),
        "sandwich_failure_rate": sandwich_failures / cfg.trials,
        "within_alpha_rate": float(np.mean(est <= cfg.alpha)),
        "baseline_beta_f_hat": beta_f_hat,
        "union_bound_floor": max(0.0, 1.0 - plan.k * beta_f_hat - cfg.budget.beta),
        "wall_ms": wall_ms,
    }
    return StatisticalResult(rows=tuple(rows), summary=summary, plan=plan)


# ---------------------------------------------------------------------------
# exact privacy audit

@dataclass(frozen=True)
class AuditConfig:
    """Exhaustive audit instance: small n, tiny grid, a fixed design.

    The pure flavor's output law is closed-form given the oracle cache, so
    for every pair of datasets one addition or removal apart the privacy
    ratio can be checked exactly, with no sampling error.
    """

    n: int
    grid_points: tuple[float, ...]
    epsilons: tuple[float, ...]
    beta: float
    statistic: str = "median"
    design_kind: str = "partition"  # partition | random
    design_t: int = 1
    design_m: int | None = None
    design_seed: int = 0
    group_distance: int | None = None

    def __post_init__(self):
        if self.n > 6:
            raise ValueError("audit enumerates all datasets; n must stay tiny")
        if len(self.grid_points) > 4:
            raise ValueError("audit grid must stay tiny")

    @classmethod
    def from_dict(cls, obj: dict) -> "AuditConfig":
        design = obj.get("design", {"kind": "partition", "t": 1})
        return cls(
            n=obj["n"],
            grid_points=tuple(obj["grid"]),
            epsilons=tuple(obj["epsilons"]),
            beta=float(obj.get("beta", 0.1)),
            statistic=obj.get("statistic", "median"),
            design_kind=design.get("kind", "partition"),
            design_t=design.get("t", 1),
            design_m=design.get("m"),
            design_seed=design.get("seed", 0),
            group_distance=obj.get("group_distance"),
        )

    def build_design(self) -> CoveringDesign:
        if self.design_kind == "partition":
            return generate_partition(self.n, self.design_t)
        if self.design_kind == "random":
            if self.design_m is None:
                raise ValueError("random audit design needs m")
            return generate_random(self.n, self.design_m, self.design_t, self.design_seed)
        raise ValueError(f"unknown design kind {self.design_kind!r}")


@dataclass(frozen=True)
class AuditReport:
    max_log_ratio: dict[float, float]
    group_log_ratio: dict[float, float]
    group_distance: int
    pairs_checked: int
    passed: bool
    rows: tuple[dict, ...]


LOG_RATIO_TOL = 1e-9


def run_dp_audit(cfg: AuditConfig, seed: int = 0) -> AuditReport:
    """Exact privacy check of the pure pipeline on every neighbouring pair.

    Enumerates all datasets over the grid's value universe extended with the
    null sentinel, computes each exact output law, and takes the worst
    log-ratio across all pairs at distance one (both directions, every
    output).  A spot check at a larger distance validates the group bound.
    A pass requires the distance-1 ratio to stay within epsilon up to 1e-9.
    """
    design = cfg.build_design()
    grid = OutputGrid(cfg.grid_points)
    stat = make_statistic(cfg.statistic, grid)
    universe = list(grid.points) + [NULL]

    laws: dict[tuple, dict[float, np.ndarray]] = {}
    shifts = {eps: pure_shift(eps, cfg.beta, len(grid)) for eps in cfg.epsilons}
    for entries in product(universe, repeat=cfg.n):
        x = Dataset(entries)
        cache = build_cache(stat, x, design, grid)
        ell, ell_bar = loss_tables(cache)
        laws[entries] = {}
        for eps in cfg.epsilons:
            shift = shifts[eps]
            scores = [max(a - shift, shift - b) for a, b in zip(ell, ell_bar)]
            laws[entries][eps] = np.log(exponential_mechanism_distribution(scores, 1.0, eps))

    def null_variants(entries: tuple, distance: int):
        present = [i for i, v in enumerate(entries) if v is not NULL]
        for combo in combinations(present, distance):
            mutated = list(entries)
            for i in combo:
                mutated[i] = NULL
            yield tuple(mutated)

    max_ratio = {eps: 0.0 for eps in cfg.epsilons}
    pairs = 0
    for entries in laws:
        for neighbour in null_variants(entries, 1):
            pairs += 1
            for eps in cfg.epsilons:
                gap = float(np.max(np.abs(laws[entries][eps] - laws[neighbour][eps])))
                if gap > max_ratio[eps]:
                    max_ratio[eps] = gap

    distance = cfg.group_distance or min(design.t, 2) or 1
    group_ratio = {eps: 0.0 for eps in cfg.epsilons}
    if distance >= 1:
        for entries in laws:
            if any(v is NULL for v in entries):
                continue  # full datasets suffice for the spot check
            for variant in null_variants(entries, distance):
                for eps in cfg.epsilons:
                    gap = float(np.max(np.abs(laws[entries][eps] - laws[variant][eps])))
                    if gap > group_ratio[eps]:
                        group_ratio[eps] = gap

    passed = all(max_ratio[eps] <= eps + LOG_RATIO_TOL for eps in cfg.epsilons) and all(
        group_ratio[eps] <= distance * eps + LOG_RATIO_TOL for eps in cfg.epsilons
    )

    rows = []
    for eps in cfg.epsilons:
        rows.append(
            _base_row(
                experiment_id="audit:distance1",
                seed=seed,
                n=design.n,
                m=design.m,
                t=design.t,
                k=design.k,
                flavor="pure",
                epsilon_or_rho=eps,
                beta=cfg.beta,
                y=max_ratio[eps],
                nu=eps,
                abs_err=max(0.0, max_ratio[eps] - eps),
                sandwich_ok=max_ratio[eps] <= eps + LOG_RATIO_TOL,
                oracle_calls=design.k,
            )
        )
        rows.append(
            _base_row(
                experiment_id=f"audit:distance{distance}",
                seed=seed,
                n=design.n,
                m=design.m,
                t=design.t,
                k=design.k,
                flavor="pure",
                epsilon_or_rho=eps,
                beta=cfg.beta,
                y=group_ratio[eps],
                nu=distance * eps,
                abs_err=max(0.0, group_ratio[eps] - distance * eps),
                sandwich_ok=group_ratio[eps] <= distance * eps + LOG_RATIO_TOL,
                oracle_calls=design.k,
            )
        )
    return AuditReport(
        max_log_ratio=max_ratio,
        group_log_ratio=group_ratio,
        group_distance=distance,
        pairs_checked=pairs,
        passed=passed,
        rows=tuple(rows),
    )


# ---------------------------------------------------------------------------
# query-complexity adversary demo

@dataclass(frozen=True)
class AdversaryConfig:
    """Hidden-set oracle demo measuring how rarely random subset queries hit.

    The value universe has ``universe_scale**2`` elements of which a hidden
    uniformly random subset of ``universe_scale`` is special.  Inputs carry
    ``n - t`` special and ``t`` outside samples in random order.  The oracle
    returns ``nu`` only for duplicate-free size-``(n-m)`` queries lying
    entirely inside the hidden set.
    """

    universe_scale: int
    n: int
    m: int
    t: int
    nu: float
    trials: int
    seed: int = 0
    epsilon: float = 1.0
    delta: float = 1e-6

    def __post_init__(self):
        if not (self.n >= self.m >= self.t >= 0):
            raise ValueError("need n >= m >= t >= 0")
        if self.universe_scale < 20 * self.n * self.n:
            raise ValueError(
                f"universe_scale must be at least 20 n^2 = {20 * self.n * self.n} "
                "to keep the collision slack below 0.025"
            )
        if self.nu == 0:
            raise ValueError("nu must be nonzero; zero is the oracle's failure value")

    @classmethod
    def from_dict(cls, obj: dict) -> "AdversaryConfig":
        return cls(
            universe_scale=obj["universe_scale"],
            n=obj["n"],
            m=obj["m"],
            t=obj["t"],
            nu=float(obj["nu"]),
            trials=obj["trials"],
            seed=obj.get("seed", 0),
            epsilon=float(obj.get("epsilon", 1.0)),
            delta=float(obj.get("delta", 1e-6)),
        )


def hidden_subset_oracle(
    special: frozenset[int], nu: float, query_size: int
) -> Callable[[Sequence[int]], float]:
    """Returns ``nu`` iff the query has exactly ``query_size`` distinct
    entries, all inside the special set; otherwise 0."""

    def oracle(values: Sequence[int]) -> float:
        vals = list(values)
        if len(vals) != query_size:
            return 0.0
        if len(set(vals)) != len(vals):
            return 0.0
        if any(v not in special for v in vals):
            return 0.0
        return nu

    return oracle


@dataclass(frozen=True)
class LowerBoundReport:
    hit_rate: float
    combinatorial_bound: float
    collision_slack: float
    standard_error: float
    implied_min_queries: float
    trials: int
    passed: bool
    rows: tuple[dict, ...]


def run_lowerbound_demo(cfg: AdversaryConfig) -> LowerBoundReport:
    """Monte Carlo estimate of the per-query success probability.

    Each trial draws a corrupted input (``n - t`` hidden-set samples and
    ``t`` outsiders, shuffled) and queries the oracle on a uniformly random
    size-``(n - m)`` position subset.  The hit rate is compared against the
    combinatorial bound binom(m, t)/binom(n, t) plus the collision slack
    n^2 / (2 * universe_scale); both terms are reported separately because
    the slack vanishes only as the universe grows.  Also reports the implied
    minimum query count for the configured (epsilon, delta).
    """
    scale = cfg.universe_scale
    gen = np.random.Generator(np.random.PCG64(cfg.seed))
    # A uniformly random hidden subset of size `scale` out of scale^2 values.
    special_array = gen.choice(scale * scale, size=scale, replace=False)
    special = frozenset(int(v) for v in special_array)
    oracle = hidden_subset_oracle(special, cfg.nu, cfg.n - cfg.m)

    in_count = cfg.n - cfg.t
    hits = 0
    for _ in range(cfg.trials):
        inside = special_array[gen.integers(0, scale, size=in_count)]
        outside = np.empty(cfg.t, dtype=np.int64)
        for j in range(cfg.t):
            v = int(gen.integers(0, scale * scale))
            while v in special:
                v = int(gen.integers(0, scale * scale))
            outside[j] = v
        corrupted = np.concatenate([inside, outside])
        gen.shuffle(corrupted)
        positions = gen.permutation(cfg.n)[: cfg.n - cfg.m]
        if oracle([int(corrupted[p]) for p in positions]) == cfg.nu:
            hits += 1

    hit_rate = hits / cfg.trials
    bound = math.comb(cfg.m, cfg.t) / math.comb(cfg.n, cfg.t)
    slack = cfg.n * cfg.n / (2.0 * scale)
    se = math.sqrt(max(hit_rate * (1.0 - hit_rate), 1.0 / cfg.trials) / cfg.trials)
    passed = hit_rate <= bound + slack + 4.0 * se

    eps, delta = cfg.epsilon, cfg.delta
    packing = 0.5 * math.exp(-2.0 * cfg.t * eps) - delta / math.expm1(eps)
    implied = (math.comb(cfg.n, cfg.t) / math.comb(cfg.m, cfg.t)) * max(0.0, packing)

    row = _base_row(
        experiment_id="lowerbound",
        seed=cfg.seed,
        n=cfg.n,
        m=cfg.m,
        t=cfg.t,
        k=int(math.ceil(implied)),
        flavor="none",
        epsilon_or_rho=eps,
        beta=delta,
        y=hit_rate,
        nu=bound + slack,
        abs_err=max(0.0, hit_rate - bound - slack),
        sandwich_lo=bound,
        sandwich_hi=bound + slack,
        sandwich_ok=passed,
        oracle_calls=cfg.trials,
    )
    return LowerBoundReport(
        hit_rate=hit_rate,
        combinatorial_bound=bound,
        collision_slack=slack,
        standard_error=se,
        implied_min_queries=implied,
        trials=cfg.trials,
        passed=passed,
        rows=(row,),
    )


# ---------------------------------------------------------------------------
# covering design benchmark

@dataclass(frozen=True)
class BenchConfig:
    """Sweep design parameters and tabulate bounds against generated sizes.

    ``m_rule`` fixes m from (n, t): ``half`` takes m around n/2, ``partition``
    takes m = t*n/(t+1) where divisible, ``complete`` takes m = t.
    """

    n_values: tuple[int, ...]
    t_values: tuple[int, ...]
    m_rule: str = "half"
    seed: int = 0
    enumeration_budget: int = 200_000

    @classmethod
    def from_dict(cls, obj: dict) -> "BenchConfig":
        return cls(
            n_values=tuple(obj["n_values"]),
            t_values=tuple(obj["t_values"]),
            m_rule=obj.get("m_rule", "half"),
            seed=obj.get("seed", 0),
            enumeration_budget=obj.get("enumeration_budget", 200_000),
        )

    def m_for(self, n: int, t: int) -> int | None:
        if self.m_rule == "half":
            m = max(t, (n + 1) // 2)
            return m if n >= m >= t else None
        if self.m_rule == "partition":
            return (t * n) // (t + 1) if n % (t + 1) == 0 else None
        if self.m_rule == "complete":
            return t
        if self.m_rule == "full":
            return n
        raise ValueError(f"unknown m_rule {self.m_rule!r}")


def run_design_bench(cfg: BenchConfig) -> tuple[tuple[dict, ...], tuple[float, ...]]:
    """One row per (n, m, t): both bounds, the generated k, verification.

    The bounds ride in the sandwich columns (they bracket the optimum, and
    the generated k must sit above the lower one).  Rows whose enumeration
    would blow the budget are marked, not fatal.  Per-row generation times
    are returned separately so the CSV body stays deterministic.
    """
    rows: list[dict] = []
    times: list[float] = []
    for n in cfg.n_values:
        for t in cfg.t_values:
            if t > n or t < 1:
                continue
            m = cfg.m_for(n, t)
            if m is None:
                continue
            row = _base_row(
                experiment_id="design_bench",
                seed=cfg.seed,
                n=n,
                m=m,
                t=t,
                flavor="random",
                epsilon_or_rho=0,
                beta=0,
                oracle_calls=0,
            )
            started = time.perf_counter()
            try:
                lower = schonheim_lower_bound(n, m, t)
                upper = erdos_spencer_upper_bound(n, m, t) if t >= 1 else 1
                if m == t * n // (t + 1) and n % (t + 1) == 0:
                    design = generate_partition(n, t)
                    row["flavor"] = "partition"
                else:
                    design = generate_random(
                        n, m, t, cfg.seed, enumeration_budget=cfg.enumeration_budget
                    )
                ok = verify(design, enumeration_budget=cfg.enumeration_budget)
                row.update(
                    k=design.k,
                    sandwich_lo=lower,
                    sandwich_hi=upper,
                    sandwich_ok=ok and lower <= design.k,
                    y=design.k,
                    nu=lower,
                    abs_err=design.k - lower,
                )
            except EnumerationBudgetError:
                row.update(experiment_id="design_bench:budget_exceeded", sandwich_ok=False)
            times.append((time.perf_counter() - started) * 1000.0)
            rows.append(row)
    return tuple(rows), tuple(times)
