"""Greedy-mini-test, partial-cover extension and the greedy approximation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import Instance, Partition, full_mask, partition_masks, refine, require_validated
from .errors import InconsistencyError, InvalidArgument


@dataclass(frozen=True)
class GreedyState:
    """Terminal state of :func:`greedy_mini_test`.

    ``F`` lists test indices in the order they were added.
    """

    F: tuple[int, ...]
    classes: Partition
    saturated: bool
    k: int

    @property
    def is_mini(self) -> bool:
        """Whether F itself is a k-mini test cover."""
        return len(self.F) <= 2 * self.k and len(self.classes) >= len(self.F) + self.k


def _scan_order(m: int, order: Sequence[int] | None) -> list[int]:
    if order is None:
        return list(range(m))
    scan = list(order)
    if sorted(scan) != list(range(m)):
        raise InvalidArgument("order must be a permutation of the test indices")
    return scan


def greedy_mini_test(inst: Instance, k: int, order: Sequence[int] | None = None) -> GreedyState:
    """Grow F by +3-class pairs or +2-class singles until |F| >= 2k - 2 or stuck.

    Pair steps are tried before single steps; within each kind the first
    improving candidate in ``order`` (index order by default) is taken.
    """
    require_validated(inst)
    if k < 1:
        raise InvalidArgument(f"k must be positive, got {k}")
    masks = inst.masks
    scan = _scan_order(inst.m, order)
    F: list[int] = []
    used: set[int] = set()
    classes = [full_mask(inst.n)]
    saturated = False
    while True:
        if len(F) >= 2 * k - 2:
            saturated = True
            break
        c = len(classes)
        step = None
        free = [i for i in scan if i not in used]
        for a, i in enumerate(free):
            after_i = refine(classes, masks[i])
            for j in free[a + 1:]:
                after_ij = refine(after_i, masks[j])
                if len(after_ij) - c >= 3:
                    step = (i, j), after_ij
                    break
            if step:
                break
        if step is None:
            for i in free:
                after_i = refine(classes, masks[i])
                if len(after_i) - c >= 2:
                    step = (i,), after_i
                    break
        if step is None:
            break
        added, classes = step
        F.extend(added)
        used.update(added)
    return GreedyState(tuple(F), Partition.from_masks(inst.n, classes), saturated, k)


def greedy_state_from(inst: Instance, F: Iterable[int], k: int) -> GreedyState:
    """Wrap an explicitly chosen F (e.g. a hand-built family) as a GreedyState."""
    F = tuple(F)
    classes = partition_masks(inst.n, (inst.masks[i] for i in F))
    return GreedyState(F, Partition.from_masks(inst.n, classes), len(F) >= 2 * k - 2, k)


def extend_partial_to_cover(inst: Instance, F: Iterable[int],
                            singletons_only: bool = False) -> tuple[int, ...]:
    """Add class-splitting tests to F until it separates every pair.

    The class worked on is always the multi-item class with the smallest
    member; in singleton mode the added test is ``{smallest member}``,
    otherwise the lowest-index test splitting that class.
    """
    require_validated(inst)
    masks = inst.masks
    chosen = list(dict.fromkeys(F))
    in_cover = set(chosen)
    classes = partition_masks(inst.n, (masks[i] for i in chosen))
    while len(classes) < inst.n:
        target = min((c for c in classes if c & (c - 1)), key=lambda c: c & -c)
        if singletons_only:
            idx = inst.index_of.get(target & -target)
            if idx is None:
                raise InvalidArgument(
                    f"singleton {{{(target & -target).bit_length()}}} missing from the instance")
        else:
            idx = next((i for i, t in enumerate(masks)
                        if i not in in_cover and t & target and t & target != target), None)
            if idx is None:
                raise InconsistencyError("no remaining test splits an unseparated class")
        chosen.append(idx)
        in_cover.add(idx)
        classes = refine(classes, masks[idx])
    return tuple(sorted(chosen))


def separation_gain(classes: Sequence[int], test: int) -> int:
    """How many still-unseparated pairs ``test`` would separate."""
    return sum((c & test).bit_count() * (c & ~test).bit_count() for c in classes)


def greedy_setcover_approx(inst: Instance) -> tuple[int, ...]:
    """Repeatedly take the test separating most unseparated pairs (ties: lowest index).

    Returns the chosen indices in selection order.
    """
    require_validated(inst)
    masks = inst.masks
    classes = [full_mask(inst.n)]
    chosen: list[int] = []
    taken: set[int] = set()
    while len(classes) < inst.n:
        best, best_gain = None, 0
        for i, t in enumerate(masks):
            if i in taken:
                continue
            gain = separation_gain(classes, t)
            if gain > best_gain:
                best, best_gain = i, gain
        if best is None:
            raise InconsistencyError("no remaining test separates an unseparated pair")
        chosen.append(best)
        taken.add(best)
        classes = refine(classes, masks[best])
    return tuple(chosen)
