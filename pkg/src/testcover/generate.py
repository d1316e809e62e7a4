"""Seeded instance and graph generators, exhaustive corpora, structured families."""
from __future__ import annotations

import random
from itertools import combinations, permutations
from typing import Iterator

import numpy as np

from .core import Instance, from_mask, partition_masks, refine, validate
from .errors import InvalidArgument
from .reductions import Graph


def gen_random(n: int, m: int, density: float, seed: int) -> tuple[Instance, int]:
    """``m`` distinct random tests, topped up with singletons until they form a test cover.

    Returns the validated instance and the number of singletons appended.
    """
    if n < 1:
        raise InvalidArgument(f"n must be positive, got {n}")
    if not 0 < density < 1:
        raise InvalidArgument(f"density must lie strictly between 0 and 1, got {density}")
    if m < 0 or m > 2 ** n - 1:
        raise InvalidArgument(f"cannot draw {m} distinct nonempty tests over {n} items")
    rng = random.Random(seed)
    seen: set[int] = set()
    masks: list[int] = []
    attempts, limit = 0, max(10_000, 100 * m)
    while len(masks) < m:
        if attempts >= limit and n <= 20:
            # Rejection is stalling (extreme density or m near 2^n - 1).
            rest = [x for x in range(1, 2 ** n) if x not in seen]
            masks.extend(rng.sample(rest, m - len(masks)))
            break
        attempts += 1
        mask = 0
        for i in range(n):
            if rng.random() < density:
                mask |= 1 << i
        if mask and mask not in seen:
            seen.add(mask)
            masks.append(mask)
    appended = 0
    classes = partition_masks(n, masks)
    while len(classes) < n:
        target = min((c for c in classes if c & (c - 1)), key=lambda c: c & -c)
        single = target & -target
        masks.append(single)
        classes = refine(classes, single)
        appended += 1
    report = validate(Instance(n, tuple(from_mask(t) for t in masks)))
    assert report.ok, report.problems()
    return report.instance, appended


def gen_random_graph(p: int, edge_prob: float, seed: int) -> Graph:
    rng = random.Random(seed)
    edges = tuple((u, v) for u in range(1, p + 1) for v in range(u + 1, p + 1)
                  if rng.random() < edge_prob)
    return Graph(p, edges)


def all_graphs(p: int, min_q: int = 0) -> Iterator[Graph]:
    """Every labeled simple graph on ``p`` vertices with at least ``min_q`` edges."""
    pairs = [(u, v) for u in range(1, p + 1) for v in range(u + 1, p + 1)]
    for bits in range(1 << len(pairs)):
        edges = tuple(e for b, e in enumerate(pairs) if bits >> b & 1)
        if len(edges) >= min_q:
            yield Graph(p, edges)


def _covers(n: int, masks) -> bool:
    return len(partition_masks(n, masks)) == n


def all_instances(n: int, max_m: int, min_m: int = 0) -> Iterator[Instance]:
    """Every validated instance on ``n`` items with ``min_m..max_m`` tests (tests in mask order)."""
    for m in range(min_m, max_m + 1):
        for combo in combinations(range(1, 2 ** n), m):
            if _covers(n, combo):
                yield Instance(n, tuple(from_mask(t) for t in combo), validated=True)


def orbit_representatives(n: int, max_m: int, min_m: int = 0) -> Iterator[Instance]:
    """One validated instance per orbit of test families under relabeling of items.

    The representative is the family whose sorted mask tuple is least among
    all relabelings.
    """
    if n > 8 or n * max_m > 62:
        raise InvalidArgument("orbit enumeration supports n <= 8 and n * m <= 62")
    size = 1 << n
    tables = []
    for perm in permutations(range(n)):
        table = np.zeros(size, dtype=np.int64)
        for mask in range(size):
            img = 0
            for i in range(n):
                if mask >> i & 1:
                    img |= 1 << perm[i]
            table[mask] = img
        tables.append(table)
    for m in range(min_m, max_m + 1):
        if m == 0:
            if n == 1:
                yield Instance(1, (), validated=True)
            continue
        combos = np.array(list(combinations(range(1, size), m)), dtype=np.int64)
        if combos.size == 0:
            continue
        shifts = np.array([n * (m - 1 - j) for j in range(m)], dtype=np.int64)
        own = (combos << shifts).sum(axis=1)
        best = own.copy()
        for table in tables[1:]:
            img = np.sort(table[combos], axis=1)
            np.minimum(best, (img << shifts).sum(axis=1), out=best)
        for row in combos[own == best]:
            masks = [int(x) for x in row]
            if _covers(n, masks):
                yield Instance(n, tuple(from_mask(t) for t in masks), validated=True)


def chain_instance(n: int) -> Instance:
    """Tests {1}, ..., {n-1}: every one of them is needed."""
    return Instance.of(n, [{i} for i in range(1, n)])


def binary_split_instance(t: int, singletons: bool = False) -> Instance:
    """n = 2^t items; test b holds the items whose (i-1) has bit b clear."""
    n = 1 << t
    tests = [frozenset(i for i in range(1, n + 1) if not (i - 1) >> b & 1)
             for b in reversed(range(t))]
    if singletons:
        tests += [frozenset({i}) for i in range(1, n + 1) if frozenset({i}) not in tests]
    return Instance.of(n, tests)


def nested_chain_family(k: int = 1, alternate: bool = False) -> tuple[Instance, tuple[int, ...]]:
    """Chain {1} < {1,2} < ... < {1..32k} inside a class of 64k items, plus singletons.

    With ``alternate`` a second class {64k+1, 64k+2} is split off by an extra
    test (returned as the F to use) and every even chain member also carries
    that class, so signatures along the chain alternate.
    """
    length = 32 * k
    n = 2 * length
    tests = [frozenset(range(1, j + 1)) for j in range(1, length + 1)]
    F: tuple[int, ...] = ()
    if alternate:
        extra = frozenset({n + 1, n + 2})
        n += 2
        tests = [t | extra if j % 2 == 0 else t for j, t in enumerate(tests, start=1)]
        F = (len(tests),)
        tests.append(extra)
    present = set(tests)
    tests += [frozenset({i}) for i in range(1, n + 1) if frozenset({i}) not in present]
    return Instance.of(n, tests), F


def _random_laminar(items: list[int], rng: random.Random) -> list[frozenset[int]]:
    """A random laminar family over ``items`` including the block itself and its singletons."""
    out = [frozenset(items)]
    if len(items) == 1:
        return out
    parts = rng.randint(2, min(3, len(items)))
    cuts = sorted(rng.sample(range(1, len(items)), parts - 1))
    bounds = [0] + cuts + [len(items)]
    for a, b in zip(bounds, bounds[1:]):
        out.extend(_random_laminar(items[a:b], rng))
    return out


def replicated_subtree_family(copies: int, block: int, extra: int = 0,
                              seed: int = 0) -> Instance:
    """``copies`` identically shaped laminar blocks of ``block`` items, plus ``extra`` items.

    The extra items carry their own random laminar family.  Singletons of
    every item are included.
    """
    rng = random.Random(seed)
    shape = _random_laminar(list(range(block)), rng)
    tests: list[frozenset[int]] = []
    for c in range(copies):
        base = c * block + 1
        tests.extend(frozenset(base + x for x in s) for s in shape)
    n = copies * block + extra
    if extra:
        start = copies * block + 1
        tests.extend(_random_laminar(list(range(start, n + 1)), rng))
    uniq = list(dict.fromkeys(t for t in tests if t != frozenset(range(1, n + 1))))
    present = set(uniq)
    uniq += [frozenset({i}) for i in range(1, n + 1) if frozenset({i}) not in present]
    return Instance.of(n, uniq)
