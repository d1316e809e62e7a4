"""Independent Set -> (m-k)-Test Cover, Test Cover -> Set Cover, and their oracles.

The Set Cover -> Test Cover direction behind the (log n + k) hardness claim
is not constructed here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Sequence

from .core import Instance, require_validated, validate
from .errors import InvalidArgument, ResourceLimitError

DEFAULT_CAP_P = 20


@dataclass(frozen=True)
class Graph:
    p: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.p < 0:
            raise InvalidArgument("vertex count must be nonnegative")
        norm = []
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise InvalidArgument(f"self-loop at vertex {u}")
            for x in (u, v):
                if not 1 <= x <= self.p:
                    raise InvalidArgument(f"vertex {x} outside [1, {self.p}]")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise InvalidArgument(f"duplicate edge {e[0]} {e[1]}")
            seen.add(e)
            norm.append(e)
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def q(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class SetCoverInstance:
    ground: tuple[Hashable, ...]
    sets: tuple[frozenset, ...]

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(frozenset(s) for s in self.sets))
        ground = set(self.ground)
        union = set().union(*self.sets) if self.sets else set()
        if not union <= ground:
            raise InvalidArgument("a set holds elements outside the ground set")

    @property
    def is_covering(self) -> bool:
        union = set().union(*self.sets) if self.sets else set()
        return union == set(self.ground)


@dataclass(frozen=True)
class IsToTcMapping:
    """Provenance of the items and tests built by :func:`is_to_tc`.

    Item ``i`` (1 <= i <= q) is edge ``e_i``; item ``q + i`` is its twin ``e'_i``.
    ``nominal_tests`` is q - 1 + p, the test count before omissions.
    """

    q: int
    vertex_test: dict[int, int] = field(default_factory=dict)
    pair_test: dict[int, int] = field(default_factory=dict)
    isolated: tuple[int, ...] = ()
    merged: dict[int, int] = field(default_factory=dict)
    nominal_tests: int = 0

    def item_label(self, item: int) -> str:
        return f"e{item}" if item <= self.q else f"e'{item - self.q}"


def is_to_tc(g: Graph) -> tuple[Instance, IsToTcMapping]:
    """Graph G -> instance where a cover of size q-1+t exists iff G has a vertex cover of size t."""
    q = g.q
    if q < 2:
        raise InvalidArgument(f"the construction needs at least two edges, got {q}")
    tests: list[frozenset[int]] = []
    vertex_test: dict[int, int] = {}
    merged: dict[int, int] = {}
    isolated = []
    by_set: dict[frozenset[int], int] = {}
    for v in range(1, g.p + 1):
        incident = frozenset(i for i, e in enumerate(g.edges, start=1) if v in e)
        if not incident:
            isolated.append(v)
            continue
        if incident in by_set:
            # Both ends of an isolated edge share the test {e}; one copy suffices.
            merged[v] = by_set[incident]
            vertex_test[v] = vertex_test[by_set[incident]]
            continue
        by_set[incident] = v
        vertex_test[v] = len(tests)
        tests.append(incident)
    pair_test = {}
    for i in range(1, q):
        pair_test[i] = len(tests)
        tests.append(frozenset({i, q + i}))
    report = validate(Instance(2 * q, tuple(tests)))
    if not report.ok:
        raise AssertionError("; ".join(report.problems()))
    mapping = IsToTcMapping(q, vertex_test, pair_test, tuple(isolated), merged, q - 1 + g.p)
    return report.instance, mapping


def tc_to_sc(inst: Instance) -> SetCoverInstance:
    """One set per test, holding the item pairs (i, j), i < j, that it separates."""
    require_validated(inst)
    ground = tuple((i, j) for i in range(1, inst.n + 1) for j in range(i + 1, inst.n + 1))
    sets = []
    for t in inst.tests:
        sets.append(frozenset((i, j) for i, j in ground if (i in t) != (j in t)))
    return SetCoverInstance(ground, tuple(sets))


def min_vertex_cover_exact(g: Graph, *, cap_p: int = DEFAULT_CAP_P) -> int:
    """Exact minimum vertex cover by branching on an uncovered edge's endpoints."""
    if g.p > cap_p:
        raise ResourceLimitError(f"p={g.p} exceeds vertex-cover cap {cap_p}", size=g.p)
    best = g.p

    def rec(edges: Sequence[tuple[int, int]], used: int) -> None:
        nonlocal best
        if used >= best:
            return
        if not edges:
            best = used
            return
        u, v = edges[0]
        for x in (u, v):
            rec([e for e in edges if x not in e], used + 1)

    rec(list(g.edges), 0)
    return best


def independence_number(g: Graph, *, cap_p: int = DEFAULT_CAP_P) -> int:
    return g.p - min_vertex_cover_exact(g, cap_p=cap_p)


def greedy_set_cover(sc: SetCoverInstance) -> list[int]:
    """Greedy: most newly covered elements first, ties to the lowest index."""
    if not sc.is_covering:
        raise InvalidArgument("the sets do not cover the ground set")
    uncovered = set(sc.ground)
    chosen: list[int] = []
    while uncovered:
        best, gain = max(((i, len(s & uncovered)) for i, s in enumerate(sc.sets)),
                         key=lambda x: (x[1], -x[0]))
        chosen.append(best)
        uncovered -= sc.sets[best]
    return chosen


def min_set_cover_exact(sc: SetCoverInstance, *, cap_sets: int = 24) -> tuple[int, ...]:
    """Smallest (then lex-least) index set covering the ground set."""
    if not sc.is_covering:
        raise InvalidArgument("the sets do not cover the ground set")
    if len(sc.sets) > cap_sets:
        raise ResourceLimitError(f"{len(sc.sets)} sets exceed cap {cap_sets}", size=len(sc.sets))
    pos = {e: b for b, e in enumerate(sc.ground)}
    bits = [sum(1 << pos[e] for e in s) for s in sc.sets]
    goal = (1 << len(sc.ground)) - 1
    for size in range(len(bits) + 1):
        for combo in combinations(range(len(bits)), size):
            acc = 0
            for i in combo:
                acc |= bits[i]
            if acc == goal:
                return combo
    raise AssertionError("covering instance without a cover")
