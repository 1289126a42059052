"""Covering designs: construction, verification, and size bounds.

An ``(n, m, t)`` covering design is a family of ``k`` size-``m`` subsets of
``1..n`` such that every subset of at most ``t`` indices is contained in some
family member.  The estimator queries the black box once per family member,
on the complement of that member, so ``k`` is the oracle budget and ``n - m``
is the data available per query.

Verification is exhaustive over all t-subsets and is co-NP-hard in general,
hence the explicit enumeration budget.  Generators: a partition construction
(disjoint chunks, ``k = t + 1``), chunk expansion of a verified base design,
the complete design of all t-subsets, and random draws patched to exactness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable

import numpy as np

DEFAULT_ENUMERATION_BUDGET = 10_000_000


class EnumerationBudgetError(RuntimeError):
    """Raised when an exhaustive phase would exceed its enumeration budget."""


def _check_params(n: int, m: int, t: int, *, min_t: int = 0) -> None:
    if not (n >= m >= t >= min_t):
        raise ValueError(f"need n >= m >= t >= {min_t}, got n={n} m={m} t={t}")


def _check_budget(n: int, t: int, budget: int) -> None:
    if math.comb(n, t) > budget:
        raise EnumerationBudgetError(
            f"C({n},{t}) = {math.comb(n, t)} t-subsets exceed the budget of {budget}"
        )


@dataclass(frozen=True)
class CoveringDesign:
    """Parameters ``(n, m, t)`` and the family of index sets, 1-based members."""

    n: int
    m: int
    t: int
    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        _check_params(self.n, self.m, self.t)
        object.__setattr__(self, "sets", tuple(frozenset(s) for s in self.sets))
        for s in self.sets:
            if len(s) != self.m:
                raise ValueError(f"set {sorted(s)} has size {len(s)}, expected m={self.m}")
            if s and (min(s) < 1 or max(s) > self.n):
                raise ValueError(f"set {sorted(s)} not within 1..{self.n}")

    @property
    def k(self) -> int:
        return len(self.sets)

    @cached_property
    def set_masks(self) -> tuple[int, ...]:
        return tuple(_mask(s) for s in self.sets)

    @cached_property
    def complement_masks(self) -> tuple[int, ...]:
        universe = (1 << self.n) - 1
        return tuple(universe & ~m for m in self.set_masks)

    @cached_property
    def complement_positions(self) -> tuple[tuple[int, ...], ...]:
        """Sorted 1-based positions outside each set: where the oracle reads."""
        return tuple(
            tuple(i for i in range(1, self.n + 1) if i not in s) for s in self.sets
        )


def _mask(members: Iterable[int]) -> int:
    out = 0
    for i in members:
        out |= 1 << (i - 1)
    return out


def verify(design: CoveringDesign, *, enumeration_budget: int = DEFAULT_ENUMERATION_BUDGET) -> bool:
    """Exhaustively check that every t-subset lies inside some family member.

    Checking subsets of size exactly ``t`` suffices: smaller ones are contained
    in larger ones.
    """
    _check_budget(design.n, design.t, enumeration_budget)
    if design.t == 0:
        return design.k >= 1
    masks = design.set_masks
    for combo in combinations(range(design.n), design.t):
        t_mask = 0
        for i in combo:
            t_mask |= 1 << i
        if not any(t_mask & ~s == 0 for s in masks):
            return False
    return True


def uncovered_t_subsets(
    design: CoveringDesign, *, enumeration_budget: int = DEFAULT_ENUMERATION_BUDGET
) -> list[tuple[int, ...]]:
    """All size-t subsets (1-based) not contained in any family member."""
    _check_budget(design.n, design.t, enumeration_budget)
    masks = design.set_masks
    missing = []
    for combo in combinations(range(1, design.n + 1), design.t):
        t_mask = _mask(combo)
        if not any(t_mask & ~s == 0 for s in masks):
            missing.append(combo)
    return missing


def schonheim_lower_bound(n: int, m: int, t: int) -> int:
    """Iterated-ceiling lower bound on the minimum size of an (n, m, t) design.

    Computed exactly in integer arithmetic; returns 1 for t = 0.
    """
    _check_params(n, m, t)
    value = 1
    for i in reversed(range(t)):
        num = (n - i) * value
        den = m - i
        value = -(-num // den)
    return value


def erdos_spencer_upper_bound(n: int, m: int, t: int) -> int:
    """Probabilistic upper bound on the minimum design size, rounded up.

    Evaluates ``binom(n,t)/binom(m,t) * (1 + log binom(m,t)) + 1`` with the
    natural logarithm.  The binomial ratio is kept exact as a fraction so
    integer-valued cases round cleanly.  The published statement omits the
    final ``+ 1`` but its derivation needs the random phase size rounded to an
    integer, which costs that extra unit; we keep the safe form.
    """
    _check_params(n, m, t, min_t=1)
    ratio = Fraction(math.comb(n, t), math.comb(m, t))
    log_term = Fraction(1.0 + math.log(math.comb(m, t)))
    return math.ceil(ratio * log_term) + 1


def generate_single(n: int, t: int) -> CoveringDesign:
    """The one-set design consisting of all of ``1..n``; m = n, k = 1."""
    _check_params(n, n, t)
    return CoveringDesign(n, n, t, (frozenset(range(1, n + 1)),))


def generate_complete(n: int, t: int) -> CoveringDesign:
    """All t-subsets of ``1..n``; m = t and k = binom(n, t), which is optimal."""
    _check_params(n, t, t, min_t=0)
    if t == 0:
        return CoveringDesign(n, 0, 0, (frozenset(),))
    sets = tuple(frozenset(c) for c in combinations(range(1, n + 1), t))
    return CoveringDesign(n, t, t, sets)


def generate_partition(n: int, t: int) -> CoveringDesign:
    """Partition ``1..n`` into ``t + 1`` chunks and take each chunk's complement.

    Requires ``t + 1`` to divide ``n``.  Yields m = t*n/(t+1) and k = t + 1;
    any t removals miss at least one chunk, so its complement set survives.
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if n % (t + 1) != 0:
        raise ValueError(f"t + 1 = {t + 1} must divide n = {n}")
    chunk = n // (t + 1)
    sets = []
    for i in range(t + 1):
        lo, hi = i * chunk + 1, (i + 1) * chunk
        sets.append(frozenset(range(1, n + 1)) - frozenset(range(lo, hi + 1)))
    return CoveringDesign(n, n - chunk, t, tuple(sets))


def generate_chunked(
    base: CoveringDesign,
    chunk: int,
    *,
    enumeration_budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> CoveringDesign:
    """Expand each base index into a block of ``chunk`` consecutive indices.

    A verified (n, m, t) base yields a (chunk*n, chunk*m, t) design of the
    same k: any t indices of the large ground set touch at most t blocks.
    """
    if chunk < 1:
        raise ValueError(f"chunk must be >= 1, got {chunk}")
    if not verify(base, enumeration_budget=enumeration_budget):
        raise ValueError("base design failed verification")
    sets = []
    for s in base.sets:
        expanded = set()
        for j in s:
            expanded.update(range((j - 1) * chunk + 1, j * chunk + 1))
        sets.append(frozenset(expanded))
    return CoveringDesign(base.n * chunk, base.m * chunk, base.t, tuple(sets))


def random_phase_size(n: int, m: int, t: int, cover_fail_prob: float) -> int:
    """Number of uniform m-subsets drawn before patching.

    Scaled so the expected number of uncovered t-subsets after the random
    phase is at most ``cover_fail_prob`` times binom(n, t) / binom(n, t)
    normalisation, i.e. the patch phase is empty with probability at least
    ``1 - cover_fail_prob``.
    """
    if not 0.0 < cover_fail_prob < 1.0:
        raise ValueError(f"cover_fail_prob must be in (0, 1), got {cover_fail_prob}")
    ratio = Fraction(math.comb(n, t), math.comb(m, t))
    log_term = math.log(math.comb(m, t)) + math.log(1.0 / cover_fail_prob)
    return max(1, math.ceil(ratio * Fraction(log_term)))


def generate_random(
    n: int,
    m: int,
    t: int,
    rng_seed: int,
    cover_fail_prob: float = 0.1,
    *,
    enumeration_budget: int = DEFAULT_ENUMERATION_BUDGET,
    with_stats: bool = False,
):
    """Draw random m-subsets, then patch every still-uncovered t-subset.

    The patch for an uncovered t-subset extends it with the lowest unused
    indices, so the result is deterministic given the seed and always
    verifies.  Duplicate draws are discarded.  With ``with_stats=True``
    returns ``(design, stats)`` where stats records the random-phase target
    and the number of patch sets added.
    """
    _check_params(n, m, t, min_t=1)
    if m == n:
        design = generate_single(n, t)
        return (design, {"random_target": 0, "drawn_unique": 1, "patched": 0}) if with_stats else design
    _check_budget(n, t, enumeration_budget)

    k1 = random_phase_size(n, m, t, cover_fail_prob)
    gen = np.random.Generator(np.random.PCG64(rng_seed))
    sets: list[frozenset[int]] = []
    seen: set[frozenset[int]] = set()
    for _ in range(k1):
        s = frozenset(int(i) + 1 for i in gen.choice(n, size=m, replace=False))
        if s not in seen:
            seen.add(s)
            sets.append(s)

    patched = 0
    masks = [_mask(s) for s in sets]
    for combo in combinations(range(1, n + 1), t):
        t_mask = _mask(combo)
        if any(t_mask & ~s == 0 for s in masks):
            continue
        patch = set(combo)
        for i in range(1, n + 1):
            if len(patch) == m:
                break
            patch.add(i)
        ps = frozenset(patch)
        if ps not in seen:
            seen.add(ps)
            sets.append(ps)
            masks.append(_mask(ps))
            patched += 1

    design = CoveringDesign(n, m, t, tuple(sets))
    if with_stats:
        return design, {"random_target": k1, "drawn_unique": len(sets) - patched, "patched": patched}
    return design


def exact_covering_number(
    n: int, m: int, t: int, *, node_budget: int = 5_000_000
) -> int:
    """Smallest k admitting an (n, m, t) design, by exhaustive search.

    Iterative deepening from the iterated-ceiling lower bound, branching on
    the first uncovered t-subset.  Only intended for small parameters
    (roughly n <= 12); raises :class:`EnumerationBudgetError` past the node
    budget.
    """
    _check_params(n, m, t)
    if t == 0 or m == n:
        return 1
    if m == t:
        return math.comb(n, t)

    t_subsets = list(combinations(range(n), t))
    t_index = {s: i for i, s in enumerate(t_subsets)}
    all_covered = (1 << len(t_subsets)) - 1

    candidates = []
    for cand in combinations(range(n), m):
        cover = 0
        for sub in combinations(cand, t):
            cover |= 1 << t_index[sub]
        candidates.append(cover)
    per_set = max(c.bit_count() for c in candidates)

    nodes = 0

    def exists(depth: int, covered: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise EnumerationBudgetError(f"node budget {node_budget} exceeded")
        if covered == all_covered:
            return True
        if depth == 0:
            return False
        remaining = all_covered & ~covered
        if -(-remaining.bit_count() // per_set) > depth:
            return False
        first = (remaining & -remaining).bit_length() - 1
        for cand in candidates:
            if (cand >> first) & 1 and exists(depth - 1, covered | cand):
                return True
        return False

    k = schonheim_lower_bound(n, m, t)
    while not exists(k, 0):
        k += 1
    return k


def save_design(design: CoveringDesign, path) -> None:
    """Text format: line 1 is ``n m t k``; then one sorted set per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{design.n} {design.m} {design.t} {design.k}\n")
        for s in design.sets:
            fh.write(" ".join(str(i) for i in sorted(s)) + "\n")


def load_design(path) -> CoveringDesign:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError("empty design file")
    header = lines[0].split()
    if len(header) != 4:
        raise ValueError(f"expected 'n m t k' header, got {lines[0]!r}")
    n, m, t, k = map(int, header)
    if len(lines) - 1 != k:
        raise ValueError(f"header promises k={k} sets, file has {len(lines) - 1}")
    sets = tuple(frozenset(map(int, ln.split())) for ln in lines[1:])
    return CoveringDesign(n, m, t, sets)
