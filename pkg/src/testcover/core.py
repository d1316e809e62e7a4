"""Instances, separation and induced partitions.

Tests are held as Python ``int`` bitmasks: item ``i`` (1-based, as in every
public interface) is bit ``i - 1``.  The frozenset view is kept alongside for
readability at API boundaries.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InvalidArgument, UnvalidatedInstance


def to_mask(items: Iterable[int]) -> int:
    mask = 0
    for i in items:
        if i < 1:
            raise InvalidArgument(f"items are 1-based, got {i}")
        mask |= 1 << (i - 1)
    return mask


def from_mask(mask: int) -> frozenset[int]:
    items = []
    i = 1
    while mask:
        if mask & 1:
            items.append(i)
        mask >>= 1
        i += 1
    return frozenset(items)


def sorted_items(test: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(test))


def full_mask(n: int) -> int:
    return (1 << n) - 1


def refine(classes: Sequence[int], test: int) -> list[int]:
    """Split every class mask by ``test``; order of untouched classes is kept."""
    out = []
    for c in classes:
        inside = c & test
        if inside and inside != c:
            out.append(inside)
            out.append(c ^ inside)
        else:
            out.append(c)
    return out


def partition_masks(n: int, tests: Iterable[int]) -> list[int]:
    classes = [full_mask(n)] if n else []
    for t in tests:
        classes = refine(classes, t)
    return classes


def count_split(classes: Sequence[int], test: int) -> int:
    """Number of classes that ``test`` would split in two."""
    hits = 0
    for c in classes:
        inside = c & test
        if inside and inside != c:
            hits += 1
    return hits


@dataclass(frozen=True)
class Instance:
    """``n`` items and an ordered collection of tests.

    Construction performs no checks beyond item representability; use
    :func:`validate` (or :meth:`Instance.of`) to obtain an instance that
    solvers accept.
    """

    n: int
    tests: tuple[frozenset[int], ...]
    validated: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgument(f"n must be positive, got {self.n}")
        object.__setattr__(self, "tests", tuple(frozenset(t) for t in self.tests))

    @classmethod
    def of(cls, n: int, tests: Iterable[Iterable[int]]) -> "Instance":
        """Build and validate; raises :class:`InvalidArgument` on any failure."""
        report = validate(cls(n, tuple(frozenset(t) for t in tests)))
        if not report.ok:
            raise InvalidArgument("; ".join(report.problems()))
        return report.instance

    @property
    def m(self) -> int:
        return len(self.tests)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(to_mask(t) for t in self.tests)

    @cached_property
    def index_of(self) -> dict[int, int]:
        """Mask -> first index holding it."""
        out: dict[int, int] = {}
        for idx, mask in enumerate(self.masks):
            out.setdefault(mask, idx)
        return out

    def test(self, ref: int) -> frozenset[int]:
        if not 0 <= ref < len(self.tests):
            raise InvalidArgument(f"test index {ref} out of range for m={self.m}")
        return self.tests[ref]


def require_validated(inst: Instance) -> None:
    if not inst.validated:
        raise UnvalidatedInstance("instance has not passed validate()")


@dataclass(frozen=True)
class Partition:
    """Disjoint classes covering [n], ordered by smallest member."""

    n: int
    masks: tuple[int, ...]

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int]) -> "Partition":
        return cls(n, tuple(sorted(masks, key=lambda c: c & -c)))

    @property
    def classes(self) -> tuple[frozenset[int], ...]:
        return tuple(from_mask(c) for c in self.masks)

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self):
        return iter(self.classes)

    def class_of(self, item: int) -> int:
        bit = 1 << (item - 1)
        for idx, c in enumerate(self.masks):
            if c & bit:
                return idx
        raise InvalidArgument(f"item {item} not in [1, {self.n}]")

    def refines(self, other: "Partition") -> bool:
        """True when every class here sits inside a class of ``other``."""
        return all(any(c & o == c for o in other.masks) for c in self.masks)


def _check_refs(inst: Instance, sub: Iterable[int]) -> list[int]:
    refs = list(sub)
    for r in refs:
        if not 0 <= r < inst.m:
            raise InvalidArgument(f"test index {r} out of range for m={inst.m}")
    return refs


def separates(test: Iterable[int], i: int, j: int, n: int | None = None) -> bool:
    if i == j:
        raise InvalidArgument("separation needs two distinct items")
    for x in (i, j):
        if x < 1 or (n is not None and x > n):
            raise InvalidArgument(f"item {x} out of range")
    test = test if isinstance(test, (set, frozenset)) else set(test)
    return (i in test) != (j in test)


def induced_partition(inst: Instance, sub: Iterable[int]) -> Partition:
    refs = _check_refs(inst, sub)
    return Partition.from_masks(inst.n, partition_masks(inst.n, (inst.masks[r] for r in refs)))


def is_test_cover(inst: Instance, sub: Iterable[int]) -> bool:
    return len(induced_partition(inst, sub)) == inst.n


def add_all_singletons(inst: Instance) -> Instance:
    """Append every missing singleton ``{i}``.

    Existing tests keep their indices, so the old-to-new index map is the
    identity on ``range(inst.m)``; new singletons follow in item order.
    """
    present = set(inst.masks)
    extra = [frozenset({i}) for i in range(1, inst.n + 1) if (1 << (i - 1)) not in present]
    out = replace(inst, tests=inst.tests + tuple(extra)) if extra else inst
    # Closure can repair an instance that was not yet a test cover.
    return out if out.validated else validate(out).instance


def complement_test(n: int, test: Iterable[int]) -> frozenset[int]:
    test = frozenset(test)
    full = frozenset(range(1, n + 1))
    if any(i < 1 or i > n for i in test):
        raise InvalidArgument(f"test {sorted(test)} not inside [1, {n}]")
    if not test or test == full:
        raise InvalidArgument("complement of an empty or full test separates nothing")
    return full - test


@dataclass(frozen=True)
class ValidationReport:
    instance: Instance
    duplicates: tuple[tuple[int, int], ...] = ()
    out_of_range: tuple[tuple[int, int], ...] = ()
    empty: tuple[int, ...] = ()
    is_test_cover: bool = False

    @property
    def ok(self) -> bool:
        return (not self.duplicates and not self.out_of_range and not self.empty
                and self.is_test_cover)

    def problems(self) -> list[str]:
        out = []
        for a, b in self.duplicates:
            out.append(f"test {b + 1} duplicates test {a + 1}")
        for t, item in self.out_of_range:
            out.append(f"test {t + 1} has item {item} outside [1, {self.instance.n}]")
        for t in self.empty:
            out.append(f"test {t + 1} is empty")
        if not self.is_test_cover:
            out.append("the tests do not separate every pair of items")
        return out


def validate(inst: Instance) -> ValidationReport:
    seen: dict[tuple[int, ...], int] = {}
    duplicates = []
    out_of_range = []
    empty = []
    clipped = []
    for idx, t in enumerate(inst.tests):
        key = sorted_items(t)
        if key in seen:
            duplicates.append((seen[key], idx))
        else:
            seen[key] = idx
        if not t:
            empty.append(idx)
        bad = [i for i in key if i < 1 or i > inst.n]
        out_of_range.extend((idx, i) for i in bad)
        clipped.append(to_mask(i for i in key if 1 <= i <= inst.n))
    cover = len(partition_masks(inst.n, clipped)) == inst.n
    ok = cover and not duplicates and not out_of_range and not empty
    return ValidationReport(
        instance=replace(inst, validated=ok),
        duplicates=tuple(duplicates),
        out_of_range=tuple(out_of_range),
        empty=tuple(empty),
        is_test_cover=cover,
    )
