"""Fixed-length tuples with a null sentinel, plus their set-style operations.

A record tuple keeps its ambient length forever: taking a subset replaces
entries with :data:`NULL` instead of shortening the tuple.  This keeps
positions stable, which is what lets index-based subset designs address the
same elements before and after removals.  Black-box statistics never see the
sentinel; they receive the non-null entries in index order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Iterator


class _NullType:
    """Sentinel standing for a removed entry. There is exactly one instance."""

    _instance = None
    __slots__ = ()

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NULL"

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self


NULL = _NullType()

#: Reserved token representing NULL in dataset files (one record per line).
NULL_TOKEN = "*"


@dataclass(frozen=True)
class IndexSet:
    """A set of distinct 1-based positions inside an ambient range ``1..n``.

    Members are stored sorted.  The ambient size travels with the set so
    complements and compatibility checks are unambiguous.
    """

    members: tuple[int, ...]
    n: int

    def __post_init__(self):
        members = tuple(sorted(set(self.members)))
        object.__setattr__(self, "members", members)
        if self.n < 0:
            raise ValueError(f"ambient size must be nonnegative, got {self.n}")
        if members and (members[0] < 1 or members[-1] > self.n):
            raise ValueError(f"members {members} not within 1..{self.n}")

    @classmethod
    def of(cls, members: Iterable[int], n: int) -> "IndexSet":
        return cls(tuple(members), n)

    @classmethod
    def full(cls, n: int) -> "IndexSet":
        return cls(tuple(range(1, n + 1)), n)

    @classmethod
    def empty(cls, n: int) -> "IndexSet":
        return cls((), n)

    def complement(self) -> "IndexSet":
        inside = set(self.members)
        return IndexSet(tuple(i for i in range(1, self.n + 1) if i not in inside), self.n)

    def intersection(self, other: "IndexSet") -> "IndexSet":
        self._check_compatible(other)
        return IndexSet(tuple(set(self.members) & set(other.members)), self.n)

    def union(self, other: "IndexSet") -> "IndexSet":
        self._check_compatible(other)
        return IndexSet(self.members + other.members, self.n)

    def mask(self) -> int:
        """Bitmask with bit ``i - 1`` set for every member ``i``."""
        m = 0
        for i in self.members:
            m |= 1 << (i - 1)
        return m

    def _check_compatible(self, other: "IndexSet") -> None:
        if self.n != other.n:
            raise ValueError(f"ambient size mismatch: {self.n} != {other.n}")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, i: int) -> bool:
        return i in set(self.members)


@dataclass(frozen=True)
class Dataset:
    """A length-``n`` tuple over an arbitrary value universe extended with NULL.

    Values only need equality; numbers and strings both work.  ``NULL`` marks
    removed entries and is assumed never to occur in sampled data.
    """

    entries: tuple[Any, ...]

    @classmethod
    def of(cls, values: Iterable[Any]) -> "Dataset":
        return cls(tuple(values))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def null_positions(self) -> frozenset[int]:
        """1-based positions currently holding NULL."""
        return frozenset(i + 1 for i, v in enumerate(self.entries) if v is NULL)

    @property
    def present_positions(self) -> tuple[int, ...]:
        return tuple(i + 1 for i, v in enumerate(self.entries) if v is not NULL)

    @property
    def present_values(self) -> tuple[Any, ...]:
        """Non-null entries in index order: what a black-box function sees."""
        return tuple(v for v in self.entries if v is not NULL)

    def __len__(self) -> int:
        return len(self.entries)


def size(x: Dataset) -> int:
    """Number of non-null entries of ``x``."""
    return sum(1 for v in x.entries if v is not NULL)


def restrict(x: Dataset, s: IndexSet) -> Dataset:
    """Keep entry ``i`` when ``i`` is in ``s``, replace the rest with NULL."""
    if s.n != x.n:
        raise ValueError(f"ambient length mismatch: index set over {s.n}, dataset of {x.n}")
    keep = set(s.members)
    return Dataset(tuple(v if (i + 1) in keep else NULL for i, v in enumerate(x.entries)))


def remove(x: Dataset, dropped: IndexSet) -> Dataset:
    """Replace the entries at ``dropped`` positions with NULL."""
    return restrict(x, dropped.complement())


def is_subset(inner: Dataset, outer: Dataset) -> bool:
    """True when every position of ``inner`` agrees with ``outer`` or holds NULL."""
    if inner.n != outer.n:
        raise ValueError(f"ambient length mismatch: {inner.n} != {outer.n}")
    return all(a is NULL or a == b for a, b in zip(inner.entries, outer.entries))


def symmetric_distance(x: Dataset, y: Dataset) -> int:
    """Additions plus removals separating ``x`` and ``y``.

    A position where exactly one side is NULL counts once; a position holding
    two distinct non-null values counts twice (a removal and an addition).
    Distance 1 is the neighbouring relation used for privacy: replacement is
    deliberately not a single step.
    """
    if x.n != y.n:
        raise ValueError(f"ambient length mismatch: {x.n} != {y.n}")
    d = 0
    for a, b in zip(x.entries, y.entries):
        if a is NULL and b is NULL:
            continue
        if a is NULL or b is NULL:
            d += 1
        elif a != b:
            d += 2
    return d


def _format_entry(v: Any) -> str:
    if v is NULL:
        return NULL_TOKEN
    if isinstance(v, bool):
        raise TypeError("boolean entries are not supported in dataset files")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    text = str(v)
    if text == NULL_TOKEN:
        raise ValueError(f"string entry collides with the reserved token {NULL_TOKEN!r}")
    return text


def _parse_entry(text: str) -> Any:
    if text == NULL_TOKEN:
        return NULL
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def dumps_dataset(x: Dataset) -> str:
    """One record per line; NULL is written as the reserved token."""
    return "".join(_format_entry(v) + "\n" for v in x.entries)


def loads_dataset(text: str) -> Dataset:
    lines = [ln.strip() for ln in text.splitlines()]
    return Dataset(tuple(_parse_entry(ln) for ln in lines if ln != ""))


def save_dataset(x: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_dataset(x))


def load_dataset(path) -> Dataset:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_dataset(fh.read())
