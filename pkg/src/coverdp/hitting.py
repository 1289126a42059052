"""Minimum hitting set over small families of index sets.

Sets are bitmasks over at most a few dozen elements.  The exact solver
branches on the elements of an unhit set and memoises on the bitmask of sets
still unhit, which is sound because the optimum depends only on that family.
Elements with identical set membership are merged up front, so structured
families (disjoint chunks, chunk expansions of a small base family) collapse
to their quotient instance.

:class:`FamilyHittingSolver` answers repeated queries for subfamilies of one
fixed family while sharing the memo across queries; the loss evaluations
sweep nested active families over a grid, which makes that sharing pay.
Intended scale: a few hundred sets with small cardinality each.
``greedy_hitting_set_size`` is the documented upper-bound fallback for runs
beyond that scale.
"""

from __future__ import annotations

from typing import Sequence


class HittingSetBudgetError(RuntimeError):
    """Raised when the exact search exceeds its node budget."""


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class FamilyHittingSolver:
    """Exact minimum hitting sizes for subfamilies of a fixed set family.

    A query names the active subfamily by a bitmask over family indices.
    Recursion state is the bitmask of active sets not yet hit; states met
    while answering one query recur in later queries (larger families pass
    through smaller ones), so the memo is shared for the solver's lifetime.
    """

    def __init__(self, masks: Sequence[int], *, node_budget: int = 5_000_000):
        self.masks = tuple(masks)
        self.node_budget = node_budget
        self._nodes = 0
        self._memo: dict[int, int] = {0: 0}

        # Merge elements with identical membership signatures; an optimal
        # solution never needs two elements of one class.
        signature: dict[int, int] = {}
        for si, m in enumerate(self.masks):
            bit = 1 << si
            for e in _bits(m):
                signature[e] = signature.get(e, 0) | bit
        class_hits = sorted(set(signature.values()), reverse=True)

        # Internally reindex sets so that branching on the lowest set bit of
        # the unhit mask prefers few-element sets; queries arrive in family
        # order and are translated once per call.
        sizes = [sum(1 for h in class_hits if h & (1 << si)) for si in range(len(self.masks))]
        by_size = sorted(range(len(self.masks)), key=lambda si: sizes[si])
        self._to_internal = [0] * len(self.masks)
        for internal, external in enumerate(by_size):
            self._to_internal[external] = internal

        def translate(hit_mask: int) -> int:
            out = 0
            for e in _bits(hit_mask):
                out |= 1 << self._to_internal[e]
            return out

        internal_hits = [translate(h) for h in class_hits]
        self._set_elems: list[tuple[int, ...]] = []
        for internal in range(len(self.masks)):
            bit = 1 << internal
            self._set_elems.append(tuple(h for h in internal_hits if h & bit))

    def size(self, active: int) -> int:
        """Minimum hits for the subfamily selected by the ``active`` bitmask.

        Every selected set must be nonempty; callers handle empty sets as
        their own infeasible case.
        """
        if active >> len(self.masks):
            raise ValueError("active mask selects sets beyond the family")
        internal = 0
        for e in _bits(active):
            if self.masks[e] == 0:
                raise ValueError("cannot hit an empty set")
            internal |= 1 << self._to_internal[e]
        return self._solve(internal)

    def _solve(self, unhit: int) -> int:
        memo = self._memo
        cached = memo.get(unhit)
        if cached is not None:
            return cached
        self._nodes += 1
        if self._nodes > self.node_budget:
            raise HittingSetBudgetError(f"node budget {self.node_budget} exceeded")
        branch = (unhit & -unhit).bit_length() - 1
        best = len(self.masks)  # one hit per set always suffices
        for h in self._set_elems[branch]:
            child = self._solve(unhit & ~h)
            if child + 1 < best:
                best = child + 1
                if best == 1:
                    break
        memo[unhit] = best
        return best


def minimum_hitting_set_size(masks: Sequence[int], *, node_budget: int = 5_000_000) -> int:
    """Size of a smallest set of elements intersecting every given set.

    Every mask must be nonzero: an empty set cannot be hit.
    """
    if not masks:
        return 0
    if any(m == 0 for m in masks):
        raise ValueError("cannot hit an empty set")
    unique = sorted(set(masks))
    solver = FamilyHittingSolver(unique, node_budget=node_budget)
    return solver.size((1 << len(unique)) - 1)


def greedy_hitting_set_size(masks: Sequence[int]) -> int:
    """Upper bound: repeatedly pick the element hitting the most unhit sets."""
    if not masks:
        return 0
    if any(m == 0 for m in masks):
        raise ValueError("cannot hit an empty set")
    sets = sorted(set(masks))
    unhit = list(range(len(sets)))
    elems = set()
    for m in sets:
        elems.update(_bits(m))
    picked = 0
    while unhit:
        best_e, best_cover = None, -1
        for e in sorted(elems):
            cover = sum(1 for si in unhit if (sets[si] >> e) & 1)
            if cover > best_cover:
                best_e, best_cover = e, cover
        unhit = [si for si in unhit if not (sets[si] >> best_e) & 1]
        picked += 1
    return picked
