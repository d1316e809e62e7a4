"""Exhaustive oracles: minimum test cover, k-mini test covers, trivial deciders.

All searches enumerate index subsets in (size, lexicographic) order, so the
first hit is the lexicographically least optimum.  Tests that split no class
when added (in index order) are skipped: an optimum never contains one, since
dropping it would give a smaller witness.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import comb
from typing import Sequence

from .core import Instance, full_mask, refine, require_validated
from .errors import InvalidArgument, ResourceLimitError, SearchTimeout

DEFAULT_CAP_M = 24
DEFAULT_CAP_SUBSETS = 1 << 24


@dataclass(frozen=True)
class ExactResult:
    optimum: int
    witness: tuple[int, ...]


def log_lower_bound(n: int) -> int:
    """Smallest t with 2**t >= n."""
    if n < 1:
        raise InvalidArgument(f"n must be positive, got {n}")
    return (n - 1).bit_length()


class _Clock:
    __slots__ = ("deadline", "ticks")

    def __init__(self, deadline: float | None):
        self.deadline = deadline
        self.ticks = 0

    def tick(self) -> None:
        self.ticks += 1
        if self.deadline is not None and not self.ticks & 1023:
            if time.monotonic() > self.deadline:
                raise SearchTimeout("search deadline passed")


def _first_hit(masks: Sequence[int], n: int, size: int, target: int,
               first: int | None = None, clock: _Clock | None = None) -> tuple[int, ...] | None:
    """Lex-least irredundant ``size``-subset inducing at least ``target`` classes.

    ``first`` pins the smallest index (used to split work across processes).
    """
    m = len(masks)
    clock = clock or _Clock(None)
    root = [full_mask(n)]
    if size == 0:
        return () if 1 >= target else None
    if target > n:
        return None

    chosen: list[int] = []

    def rec(start: int, stop: int, classes: list[int]) -> bool:
        need = size - len(chosen)
        c = len(classes)
        if need == 0:
            return c >= target
        if min(n, c << need) < target:
            return False
        for idx in range(start, min(stop, m - need + 1)):
            clock.tick()
            nxt = refine(classes, masks[idx])
            if len(nxt) == c:
                continue
            chosen.append(idx)
            if rec(idx + 1, m, nxt):
                return True
            chosen.pop()
        return False

    if first is None:
        found = rec(0, m, root)
    else:
        found = rec(first, first + 1, root)
    return tuple(chosen) if found else None


def _first_hit_task(args):
    return _first_hit(*args)


def _search_sizes(masks: Sequence[int], n: int, sizes, target_of, workers: int,
                  deadline: float | None) -> tuple[int, ...] | None:
    clock = _Clock(deadline)
    if workers <= 1:
        for s in sizes:
            hit = _first_hit(masks, n, s, target_of(s), clock=clock)
            if hit is not None:
                return hit
        return None
    masks = tuple(masks)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for s in sizes:
            if s == 0:
                hit = _first_hit(masks, n, 0, target_of(0))
                if hit is not None:
                    return hit
                continue
            jobs = [(masks, n, s, target_of(s), f) for f in range(len(masks) - s + 1)]
            hits = [h for h in pool.map(_first_hit_task, jobs) if h is not None]
            if deadline is not None and time.monotonic() > deadline:
                raise SearchTimeout("search deadline passed")
            if hits:
                return min(hits)
    return None


def _subset_count(m: int, max_size: int) -> int:
    return sum(comb(m, s) for s in range(0, min(m, max_size) + 1))


def min_test_cover_exact(inst: Instance, *, cap_m: int = DEFAULT_CAP_M, workers: int = 1,
                         deadline: float | None = None) -> ExactResult:
    require_validated(inst)
    if inst.m > cap_m:
        raise ResourceLimitError(f"m={inst.m} exceeds brute-force cap {cap_m}", size=inst.m)
    n = inst.n
    sizes = range(log_lower_bound(n), inst.m + 1)
    hit = _search_sizes(inst.masks, n, sizes, lambda s: n, workers, deadline)
    if hit is None:
        # Validated instances always contain a cover: the full collection.
        raise AssertionError("validated instance without a test cover")
    return ExactResult(len(hit), hit)


def find_k_mini_brute(inst: Instance, k: int, *, cap_subsets: int = DEFAULT_CAP_SUBSETS,
                      workers: int = 1, deadline: float | None = None) -> tuple[int, ...] | None:
    """Smallest (then lex-least) F' with |F'| <= 2k inducing >= |F'| + k classes."""
    require_validated(inst)
    if k < 1:
        raise InvalidArgument(f"k must be positive, got {k}")
    # Sizes past n - k can never reach |F'| + k <= n classes.
    top = min(2 * k, inst.m, inst.n - k)
    if top < 0:
        return None
    total = _subset_count(inst.m, top)
    if total > cap_subsets:
        raise ResourceLimitError(
            f"k-mini enumeration needs {total} subsets, cap is {cap_subsets}", size=total)
    return _search_sizes(inst.masks, inst.n, range(0, top + 1), lambda s: s + k,
                         workers, deadline)


def decide_k_param(inst: Instance, k: int, *, cap_subsets: int = DEFAULT_CAP_SUBSETS,
                   deadline: float | None = None) -> bool:
    """Is there a test cover with at most ``k`` tests?"""
    require_validated(inst)
    if k < 0:
        raise InvalidArgument(f"k must be nonnegative, got {k}")
    lb = log_lower_bound(inst.n)
    if k < lb:
        return False
    top = min(k, inst.m)
    total = sum(comb(inst.m, s) for s in range(lb, top + 1))
    if total > cap_subsets:
        raise ResourceLimitError(
            f"size-{k} search needs {total} subsets, cap is {cap_subsets}", size=total)
    n = inst.n
    return _search_sizes(inst.masks, n, range(lb, top + 1), lambda s: n, 1, deadline) is not None


def decide_nk_brute(inst: Instance, k: int, *, cap_m: int = DEFAULT_CAP_M, workers: int = 1,
                    deadline: float | None = None) -> bool:
    """Is there a test cover with at most ``n - k`` tests?"""
    if k < 1:
        raise InvalidArgument(f"k must be positive, got {k}")
    res = min_test_cover_exact(inst, cap_m=cap_m, workers=workers, deadline=deadline)
    return res.optimum <= inst.n - k
