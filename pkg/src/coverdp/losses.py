"""Monotone envelope of cached black-box values and its removal losses.

After the oracle phase the estimator holds one value per design set: the
black box applied to that set's complement.  The monotone envelope of a
subset of the input is the maximum cached value among sets that contain every
dropped (or null) position, with the bottom grid point standing in for an
empty maximum.  Removing entries can only shrink that survivor set, so the
envelope is monotone under removals.

``removal_loss(cache, y)`` is the least number of entries whose removal
drives the envelope to ``y`` or below.  Because a removal erases exactly the
sets whose complement it touches, this equals a minimum hitting set over the
complements of the sets whose value exceeds ``y``, which is how it is
computed here.  ``brute_force_removal_loss`` recomputes the same quantity by
enumerating all subsets against a definition-style envelope and serves as the
independent correctness oracle.  Both losses move by at most one when one
entry is added or removed, which is the property the private mechanisms rely
on.
"""

from __future__ import annotations

import bisect
import json
import threading
from dataclasses import dataclass, replace
from functools import cached_property
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .data import NULL, Dataset, IndexSet, restrict
from .designs import CoveringDesign, EnumerationBudgetError
from .hitting import FamilyHittingSolver, greedy_hitting_set_size


@dataclass(frozen=True)
class OutputGrid:
    """Finite, strictly increasing output space of the black-box function."""

    points: tuple[float, ...]

    def __post_init__(self):
        points = tuple(float(p) for p in self.points)
        object.__setattr__(self, "points", points)
        if not points:
            raise ValueError("grid must be nonempty")
        if any(a >= b for a, b in zip(points, points[1:])):
            raise ValueError("grid points must be strictly increasing")

    @classmethod
    def from_range(cls, low: int, high: int) -> "OutputGrid":
        """Integer grid ``low, low + 1, ..., high``."""
        return cls(tuple(float(v) for v in range(low, high + 1)))

    @property
    def min_point(self) -> float:
        return self.points[0]

    @property
    def max_point(self) -> float:
        return self.points[-1]

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, i: int) -> float:
        return self.points[i]

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, value) -> bool:
        try:
            self.index_of(value)
            return True
        except ValueError:
            return False

    def index_of(self, value: float, *, tol: float = 1e-9) -> int:
        v = float(value)
        i = bisect.bisect_left(self.points, v - tol)
        if i < len(self.points) and abs(self.points[i] - v) <= tol:
            return i
        raise ValueError(f"{value!r} is not a grid point")

    def nearest_index(self, value: float) -> int:
        v = float(value)
        i = bisect.bisect_left(self.points, v)
        if i == 0:
            return 0
        if i == len(self.points):
            return len(self.points) - 1
        # ties snap to the lower point
        return i if self.points[i] - v < v - self.points[i - 1] else i - 1

    def snap(self, value: float) -> float:
        return self.points[self.nearest_index(value)]


class OracleCounter:
    """Wraps a black-box callable and counts invocations."""

    def __init__(self, fn: Callable[[Sequence], float]):
        self._fn = fn
        self._lock = threading.Lock()
        self.calls = 0

    def __call__(self, values: Sequence) -> float:
        with self._lock:
            self.calls += 1
        return self._fn(values)


@dataclass(frozen=True)
class OracleCache:
    """Everything the estimator reads after the oracle phase.

    ``values[i]`` is the black box applied to the complement of design set
    ``i``.  ``null_positions`` records entries of the underlying input that
    were already null when the cache was built; a design set only
    participates in the envelope when it contains all of them.
    """

    design: CoveringDesign
    grid: OutputGrid
    values: tuple[float, ...]
    null_positions: frozenset[int] = frozenset()
    oracle_calls: int = 0

    def __post_init__(self):
        if len(self.values) != self.design.k:
            raise ValueError(
                f"need one value per design set: {len(self.values)} != k={self.design.k}"
            )
        for v in self.values:
            self.grid.index_of(v)  # raises if the black box left the declared grid

    @cached_property
    def null_mask(self) -> int:
        m = 0
        for i in self.null_positions:
            m |= 1 << (i - 1)
        return m

    @cached_property
    def alive(self) -> tuple[bool, ...]:
        """Which design sets contain every null position of the input."""
        nm = self.null_mask
        return tuple(nm & ~s == 0 for s in self.design.set_masks)

    @cached_property
    def reduced_complements(self) -> tuple[int, ...]:
        """Complement masks over merged position classes, aligned with sets.

        Positions belonging to exactly the same complements are
        interchangeable for hitting-set sizes, so they collapse to one class;
        chunk-expanded designs shrink to their base structure.  Valid for any
        subfamily of the complements, hence for every active family.
        """
        signature: dict[int, int] = {}
        for si, positions in enumerate(self.design.complement_positions):
            bit = 1 << si
            for p in positions:
                signature[p] = signature.get(p, 0) | bit
        class_of: dict[int, int] = {}
        masks = []
        for positions in self.design.complement_positions:
            m = 0
            for p in positions:
                sig = signature[p]
                if sig not in class_of:
                    class_of[sig] = len(class_of)
                m |= 1 << class_of[sig]
            masks.append(m)
        return tuple(masks)

    @cached_property
    def hitting_solver(self) -> FamilyHittingSolver:
        """Shared exact solver over the reduced complements.

        Active families at different grid points are nested, so the memo
        carried across queries makes whole-grid loss tables cheap.
        """
        return FamilyHittingSolver(self.reduced_complements)

    def with_nulls(self, positions: Iterable[int]) -> "OracleCache":
        """Cache for the same input with additional entries removed.

        Valid because cached values of surviving sets are unchanged by
        removals inside those sets' complements' complement, i.e. the values
        that still participate agree with a fresh oracle phase.
        """
        extra = frozenset(positions)
        if extra and (min(extra) < 1 or max(extra) > self.design.n):
            raise ValueError(f"positions {sorted(extra)} out of range 1..{self.design.n}")
        return replace(self, null_positions=self.null_positions | extra)

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.design.n,
                "m": self.design.m,
                "t": self.design.t,
                "sets": [sorted(s) for s in self.design.sets],
                "grid": list(self.grid.points),
                "values": list(self.values),
                "null_positions": sorted(self.null_positions),
                "oracle_calls": self.oracle_calls,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "OracleCache":
        obj = json.loads(text)
        design = CoveringDesign(
            obj["n"], obj["m"], obj["t"], tuple(frozenset(s) for s in obj["sets"])
        )
        return cls(
            design=design,
            grid=OutputGrid(tuple(obj["grid"])),
            values=tuple(obj["values"]),
            null_positions=frozenset(obj["null_positions"]),
            oracle_calls=obj["oracle_calls"],
        )


def build_cache(
    f: Callable[[Sequence], float],
    x: Dataset,
    design: CoveringDesign,
    grid: OutputGrid,
    *,
    concurrency_safe: bool = False,
) -> OracleCache:
    """Run the oracle phase: evaluate ``f`` once per design set.

    ``f`` receives the non-null entries of the complement restriction in
    index order and must return a grid point.  Invocations are sequential in
    set order unless the caller declares ``f`` concurrency-safe.
    """
    if design.n != x.n:
        raise ValueError(f"design over 1..{design.n} but dataset has length {x.n}")
    counter = f if isinstance(f, OracleCounter) else OracleCounter(f)
    calls_before = counter.calls
    entries = x.entries
    inputs = [
        tuple(v for v in (entries[p - 1] for p in positions) if v is not NULL)
        for positions in design.complement_positions
    ]
    if concurrency_safe and len(inputs) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor() as pool:
            values = tuple(float(v) for v in pool.map(counter, inputs))
    else:
        values = tuple(float(counter(vals)) for vals in inputs)
    return OracleCache(
        design=design,
        grid=grid,
        values=values,
        null_positions=x.null_positions,
        oracle_calls=counter.calls - calls_before,
    )


def infeasible_loss(cache: OracleCache) -> int:
    """Sentinel ordered above every achievable removal count."""
    return cache.design.n + 1


def _drop_mask(drop) -> int:
    if isinstance(drop, IndexSet):
        return drop.mask()
    m = 0
    for i in drop:
        m |= 1 << (i - 1)
    return m


def monotone_envelope(drop, cache: OracleCache) -> float:
    """Envelope value after removing the ``drop`` positions from the input.

    Maximum cached value over design sets containing every dropped and every
    null position; the bottom grid point when no set survives.
    """
    gone = _drop_mask(drop) | cache.null_mask
    best = None
    for s_mask, v in zip(cache.design.set_masks, cache.values):
        if gone & ~s_mask == 0 and (best is None or v > best):
            best = v
    return cache.grid.min_point if best is None else best


def _active_mask(cache: OracleCache, y: float, *, strict_below: bool) -> int:
    """Index bitmask of alive sets whose value exceeds (or reaches) ``y``."""
    keep = (lambda v: v >= y) if strict_below else (lambda v: v > y)
    mask = 0
    for si, (v, ok) in enumerate(zip(cache.values, cache.alive)):
        if ok and keep(v):
            mask |= 1 << si
    return mask


def _hitting_size(cache: OracleCache, active: int, method: str) -> int:
    if active == 0:
        return 0
    reduced = cache.reduced_complements
    if any(reduced[si] == 0 for si in range(cache.design.k) if active & (1 << si)):
        return infeasible_loss(cache)  # a full-width set can never be erased
    if method == "greedy":
        masks = [reduced[si] for si in range(cache.design.k) if active & (1 << si)]
        return greedy_hitting_set_size(masks)
    return cache.hitting_solver.size(active)


def removal_loss(cache: OracleCache, y: float, *, method: str = "exact") -> int:
    """Least number of removals driving the envelope to at most ``y``.

    Equals a minimum hitting set over the complements of sets with value
    above ``y``; zero when nothing is above.  ``y`` must not lie below the
    grid, where no removal count would suffice.
    """
    if y < cache.grid.min_point:
        raise ValueError(f"y={y} below the grid bottom {cache.grid.min_point}")
    return _hitting_size(cache, _active_mask(cache, y, strict_below=False), method)


def strict_removal_loss(cache: OracleCache, y: float, *, method: str = "exact") -> int:
    """Least removals driving the envelope strictly below ``y``.

    At the bottom grid point the envelope can never go lower, so the result
    is the infeasibility sentinel ``n + 1``: larger than any achievable count
    and constant across inputs, which preserves the unit-sensitivity of the
    shifted score.
    """
    if y <= cache.grid.min_point:
        return infeasible_loss(cache)
    return _hitting_size(cache, _active_mask(cache, y, strict_below=True), method)


def shifted_loss(cache: OracleCache, y: float, shift: int, *, method: str = "exact") -> int:
    """Score ``max(removal_loss - shift, shift - strict_removal_loss)``.

    Nonpositive somewhere on the grid for any input, and quasi-convex along
    the sorted grid: the first branch falls while the second rises.
    """
    if shift < 1:
        raise ValueError(f"shift must be a positive integer, got {shift}")
    ell = removal_loss(cache, y, method=method)
    ell_bar = strict_removal_loss(cache, y, method=method)
    return max(ell - shift, shift - ell_bar)


def loss_tables(cache: OracleCache, *, method: str = "exact") -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Both removal losses at every grid point, solving once per active family.

    The active family only changes when ``y`` crosses a cached value, so the
    number of distinct hitting-set instances is bounded by the number of
    distinct values, not the grid size.
    """
    solved: dict[int, int] = {}

    def solve(active: int) -> int:
        if active not in solved:
            solved[active] = _hitting_size(cache, active, method)
        return solved[active]

    # Walk the grid from the top, activating sets as their value is crossed;
    # the two sweeps differ only in strict versus non-strict comparison.
    alive_order = sorted(
        (si for si in range(cache.design.k) if cache.alive[si]),
        key=lambda si: cache.values[si],
        reverse=True,
    )
    points = cache.grid.points
    ell: list[int] = [0] * len(points)
    ell_bar: list[int] = [0] * len(points)
    mask_gt = mask_ge = 0
    ptr_gt = ptr_ge = 0
    for j in range(len(points) - 1, -1, -1):
        y = points[j]
        while ptr_gt < len(alive_order) and cache.values[alive_order[ptr_gt]] > y:
            mask_gt |= 1 << alive_order[ptr_gt]
            ptr_gt += 1
        while ptr_ge < len(alive_order) and cache.values[alive_order[ptr_ge]] >= y:
            mask_ge |= 1 << alive_order[ptr_ge]
            ptr_ge += 1
        ell[j] = solve(mask_gt)
        ell_bar[j] = infeasible_loss(cache) if y <= cache.grid.min_point else solve(mask_ge)
    return tuple(ell), tuple(ell_bar)


def shifted_loss_table(cache: OracleCache, shift: int, *, method: str = "exact") -> tuple[int, ...]:
    if shift < 1:
        raise ValueError(f"shift must be a positive integer, got {shift}")
    ell, ell_bar = loss_tables(cache, method=method)
    return tuple(max(a - shift, shift - b) for a, b in zip(ell, ell_bar))


def definition_envelope(
    design: CoveringDesign, values: Sequence[float], grid: OutputGrid
) -> Callable[[Dataset], float]:
    """Envelope evaluator straight from the definition, for oracle testing.

    Scans every design set and includes its cached value iff the subset has
    no null inside that set's complement.  Shares no code with the
    hitting-set path.
    """
    comp_masks = design.complement_masks

    def envelope(sub: Dataset) -> float:
        if sub.n != design.n:
            raise ValueError(f"dataset length {sub.n} != design ambient {design.n}")
        null_mask = 0
        for i, v in enumerate(sub.entries):
            if v is NULL:
                null_mask |= 1 << i
        best = None
        for comp, v in zip(comp_masks, values):
            if comp & null_mask == 0 and (best is None or v > best):
                best = v
        return grid.min_point if best is None else best

    return envelope


_BRUTE_FORCE_LIMIT = 15


def _enumerated_losses(
    x: Dataset, envelope: Callable[[Dataset], float], y: float, *, strict: bool
) -> int:
    positions = x.present_positions
    if len(positions) > _BRUTE_FORCE_LIMIT:
        raise EnumerationBudgetError(
            f"brute force enumerates 2^{len(positions)} subsets; limit is 2^{_BRUTE_FORCE_LIMIT}"
        )
    below = (lambda g: g < y) if strict else (lambda g: g <= y)
    for r in range(len(positions) + 1):
        for combo in combinations(positions, r):
            sub = restrict(x, IndexSet.of(set(positions) - set(combo), x.n))
            if below(envelope(sub)):
                return r
    return x.n + 1


def brute_force_removal_loss(x: Dataset, envelope: Callable[[Dataset], float], y: float) -> int:
    """Reference value of :func:`removal_loss` by full subset enumeration."""
    return _enumerated_losses(x, envelope, y, strict=False)


def brute_force_strict_removal_loss(
    x: Dataset, envelope: Callable[[Dataset], float], y: float
) -> int:
    """Reference value of :func:`strict_removal_loss` by full enumeration."""
    return _enumerated_losses(x, envelope, y, strict=True)


def brute_force_loss_tables(
    x: Dataset, envelope: Callable[[Dataset], float], grid: OutputGrid
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Both reference losses on the whole grid in one enumeration sweep."""
    positions = x.present_positions
    if len(positions) > _BRUTE_FORCE_LIMIT:
        raise EnumerationBudgetError(
            f"brute force enumerates 2^{len(positions)} subsets; limit is 2^{_BRUTE_FORCE_LIMIT}"
        )
    sentinel = x.n + 1
    ell = [sentinel] * len(grid)
    ell_bar = [sentinel] * len(grid)
    for r in range(len(positions) + 1):
        if all(v < sentinel for v in ell) and all(v < sentinel for v in ell_bar):
            break
        for combo in combinations(positions, r):
            sub = restrict(x, IndexSet.of(set(positions) - set(combo), x.n))
            g = envelope(sub)
            for j, y in enumerate(grid.points):
                if ell[j] == sentinel and g <= y:
                    ell[j] = r
                if ell_bar[j] == sentinel and g < y:
                    ell_bar[j] = r
    return tuple(ell), tuple(ell_bar)
