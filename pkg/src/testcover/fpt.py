"""Kernelization pipeline deciding whether a test cover of size <= n - k exists.

After singleton closure and Greedy-mini-test, every test outside the greedy
family F splits at most one greedy class C.  For such a C-test S the local
portion is ``S & C`` and the global portion ``S - C``.  Once local portions
are normalized to at most half of their class they form a laminar family,
arranged here as one containment tree per class.  Two answer-preserving rules
shrink those trees:

* path rule: 32k vertices with equal signature on one root-to-leaf path; all
  tests whose local portion is the 16k-th of them are deleted;
* sibling rule: 2k + 2 pairwise strongly isomorphic child subtrees under one
  vertex; the least one's tests and the items of its root portion are deleted.

The remaining kernel is decided by exhaustive k-mini search.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable

from .core import (Instance, Partition, add_all_singletons, from_mask, full_mask,
                   require_validated, sorted_items, to_mask, validate)
from .errors import InconsistencyError, InvalidArgument, InvariantViolation
from .exact import DEFAULT_CAP_SUBSETS, find_k_mini_brute
from .greedy import GreedyState, extend_partial_to_cover, greedy_mini_test, greedy_state_from

PATH_RULE = "path"
SIBLING_RULE = "sibling"
COMPLEMENT_RULE = "complement"


@dataclass(frozen=True)
class Signature:
    """Global portions of every test sharing one local portion."""

    globals: frozenset[frozenset[int]]


@dataclass(frozen=True)
class RuleTrace:
    rule: str
    class_index: int
    tests: tuple[int, ...]
    items: tuple[int, ...] = ()
    detail: str = ""
    renumber: tuple[tuple[int, int], ...] = ()

    def line(self) -> str:
        tests = ",".join(str(t + 1) for t in self.tests)
        items = ",".join(str(i) for i in self.items)
        return f"RULE {self.rule} class={self.class_index + 1} tests=[{tests}] items=[{items}]"


def _key(portion: frozenset[int]) -> tuple[int, ...]:
    return sorted_items(portion)


@dataclass(frozen=True)
class ClassTree:
    """Containment out-tree of the distinct local portions inside one class.

    ``children`` maps every vertex (root included) to its children, sorted
    lexicographically.  ``sig_keys`` renders each signature over class
    indices, which is what subtree isomorphism compares.
    """

    class_index: int
    root: frozenset[int]
    children: dict[frozenset[int], tuple[frozenset[int], ...]]
    parent: dict[frozenset[int], frozenset[int]]
    signatures: dict[frozenset[int], Signature]
    sig_keys: dict[frozenset[int], tuple]

    def preorder(self) -> list[frozenset[int]]:
        out = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(reversed(self.children[v]))
        return out

    @property
    def leaves(self) -> list[frozenset[int]]:
        return [v for v in self.preorder() if not self.children[v]]

    @property
    def depth(self) -> int:
        best = 0
        stack = [(self.root, 0)]
        while stack:
            v, d = stack.pop()
            best = max(best, d)
            stack.extend((c, d + 1) for c in self.children[v])
        return best

    def subtree(self, v: frozenset[int]) -> list[frozenset[int]]:
        out = []
        stack = [v]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(self.children[x])
        return out


@dataclass(frozen=True)
class FptState:
    """A singleton-closed instance together with its greedy family F."""

    inst: Instance
    k: int
    greedy: GreedyState
    normalized: bool = False
    history: tuple[RuleTrace, ...] = ()

    @property
    def classes(self) -> Partition:
        return self.greedy.classes

    @cached_property
    def roles(self) -> tuple[int | None, ...]:
        """Index of the class each test splits, or None for tests splitting none."""
        classes = self.classes.masks
        out = []
        for idx, t in enumerate(self.inst.masks):
            hits = [ci for ci, c in enumerate(classes) if t & c and t & c != c]
            if len(hits) > 1:
                raise InvariantViolation(
                    f"test {idx + 1} splits classes {hits[0] + 1} and {hits[1] + 1}")
            out.append(hits[0] if hits else None)
        return tuple(out)

    @cached_property
    def trees(self) -> dict[int, ClassTree]:
        return {ci: build_class_tree(self, ci)
                for ci, c in enumerate(self.classes.masks) if c & (c - 1)}


def prepare_state(inst: Instance, k: int, F=None) -> FptState:
    """Singleton-close, run (or accept) the greedy family, normalize."""
    require_validated(inst)
    if k < 1:
        raise InvalidArgument(f"k must be positive, got {k}")
    closed = add_all_singletons(inst)
    greedy = greedy_mini_test(closed, k) if F is None else greedy_state_from(closed, F, k)
    return normalize_locals(FptState(closed, k, greedy))


def _rebuild(inst: Instance, state: FptState, F: tuple[int, ...],
             history: tuple[RuleTrace, ...]) -> FptState:
    greedy = greedy_state_from(inst, F, state.k)
    greedy = replace(greedy, saturated=state.greedy.saturated)
    return FptState(inst, state.k, greedy, False, history)


def normalize_locals(state: FptState) -> FptState:
    """Swap every C-test holding more than half of C for its complement.

    A complement that already exists as a test makes the original redundant
    (both separate the same pairs); the original is then dropped.
    """
    inst = state.inst
    classes = state.classes.masks
    full = full_mask(inst.n)
    in_F = set(state.greedy.F)
    present = set(inst.masks)
    tests: list[int] = []
    old_to_new: dict[int, int] = {}
    traces = []
    for idx, (t, role) in enumerate(zip(inst.masks, state.roles)):
        if idx not in in_F and role is not None:
            c = classes[role]
            if 2 * (t & c).bit_count() > c.bit_count():
                comp = full ^ t
                if comp in present:
                    traces.append(RuleTrace(COMPLEMENT_RULE, role, (idx,),
                                            detail=f"complement of test {idx + 1} already present"))
                    continue
                t = comp
        old_to_new[idx] = len(tests)
        tests.append(t)
    if tests == list(inst.masks):
        return replace(state, normalized=True)
    new_inst = Instance(inst.n, tuple(from_mask(t) for t in tests), validated=True)
    F = tuple(old_to_new[i] for i in state.greedy.F)
    out = _rebuild(new_inst, state, F, state.history + tuple(traces))
    return replace(out, normalized=True)


def _class_key(g: int, classes: tuple[int, ...], own: int) -> tuple[int, ...]:
    members = []
    rest = g
    for cj, c in enumerate(classes):
        if cj == own:
            continue
        if g & c == c:
            members.append(cj)
            rest &= ~c
        elif g & c:
            raise InvariantViolation(f"global portion {sorted(from_mask(g))} splits class {cj + 1}")
    if rest:
        raise InvariantViolation(f"global portion {sorted(from_mask(g))} leaves the item range")
    return tuple(members)


def build_class_tree(state: FptState, ci: int) -> ClassTree:
    classes = state.classes.masks
    if not 0 <= ci < len(classes):
        raise InvalidArgument(f"class index {ci} out of range")
    C = classes[ci]
    if C.bit_count() < 2:
        raise InvalidArgument(f"class {ci + 1} has a single item and no tree")
    portions: dict[int, set[int]] = {}
    for t, role in zip(state.inst.masks, state.roles):
        if role == ci:
            portions.setdefault(t & C, set()).add(t & ~C)

    locs = sorted(portions, key=lambda p: (p.bit_count(), _key(from_mask(p))))
    for a in range(len(locs)):
        for b in range(a + 1, len(locs)):
            x, y = locs[a], locs[b]
            inter = x & y
            if inter and inter != x and inter != y:
                raise InvariantViolation(
                    f"class {ci + 1}: local portions {sorted(from_mask(x))} and "
                    f"{sorted(from_mask(y))} overlap without nesting")

    parent_mask: dict[int, int] = {}
    for a, p in enumerate(locs):
        parent_mask[p] = C
        for q in locs[a + 1:]:
            if q.bit_count() > p.bit_count() and q & p == p:
                parent_mask[p] = q
                break

    root = from_mask(C)
    to_set = {p: from_mask(p) for p in locs}
    kids: dict[frozenset[int], list[frozenset[int]]] = {root: []}
    for p in locs:
        kids[to_set[p]] = []
    parent = {}
    for p in locs:
        par = root if parent_mask[p] == C else to_set[parent_mask[p]]
        parent[to_set[p]] = par
        kids[par].append(to_set[p])
    children = {v: tuple(sorted(cs, key=_key)) for v, cs in kids.items()}

    signatures = {}
    sig_keys: dict[frozenset[int], tuple] = {root: ()}
    for p in locs:
        v = to_set[p]
        signatures[v] = Signature(frozenset(from_mask(g) for g in portions[p]))
        sig_keys[v] = tuple(sorted(_class_key(g, classes, ci) for g in portions[p]))

    for v, cs in children.items():
        if len(cs) == 1:
            raise InvariantViolation(f"class {ci + 1}: vertex {_key(v)} has out-degree one")
    leaves = {v for v, cs in children.items() if not cs}
    if leaves != {frozenset({x}) for x in root}:
        raise InvariantViolation(f"class {ci + 1}: leaves are not exactly the singletons")
    return ClassTree(ci, root, children, parent, signatures, sig_keys)


def signature_of(state: FptState, ci: int, portion) -> Signature:
    tree = state.trees.get(ci)
    portion = frozenset(portion)
    if tree is None:
        raise InvalidArgument(f"class {ci + 1} has no tree")
    if portion == tree.root:
        return Signature(frozenset())
    if portion not in tree.signatures:
        raise InvalidArgument(f"{sorted(portion)} is not a vertex of tree {ci + 1}")
    return tree.signatures[portion]


def canonical_tree_code(tree: ClassTree, v) -> tuple:
    """AHU-style code: (signature over class indices, sorted child codes)."""
    v = frozenset(v)
    if v not in tree.children:
        raise InvalidArgument(f"{sorted(v)} is not a vertex of tree {tree.class_index + 1}")
    codes: dict[frozenset[int], tuple] = {}
    order = tree.subtree(v)
    for x in reversed(order):
        codes[x] = (tree.sig_keys[x], tuple(sorted(codes[c] for c in tree.children[x])))
    return codes[v]


def _path_trigger(tree: ClassTree, threshold: int, pick: int) -> frozenset[int] | None:
    """DFS keeping, per signature, the same-signature vertices on the current path."""
    on_path: dict[Signature, list[frozenset[int]]] = {}
    stack: list[tuple[frozenset[int], int]] = [(tree.root, 0)]
    trail: list[frozenset[int]] = []
    while stack:
        v, depth = stack.pop()
        while len(trail) > depth:
            gone = trail.pop()
            on_path[tree.signatures[gone]].pop()
        if v != tree.root:
            same = on_path.setdefault(tree.signatures[v], [])
            same.append(v)
            trail.append(v)
            if len(same) >= threshold:
                return same[pick - 1]
        next_depth = depth + 1 if v != tree.root else 0
        stack.extend((c, next_depth) for c in reversed(tree.children[v]))
    return None


def apply_path_rule(state: FptState) -> tuple[FptState, RuleTrace] | None:
    k = state.k
    threshold, pick = 32 * k, 16 * k
    for ci in sorted(state.trees):
        tree = state.trees[ci]
        if tree.depth < threshold:
            continue
        star = _path_trigger(tree, threshold, pick)
        if star is None:
            continue
        C = state.classes.masks[ci]
        star_mask = to_mask(star)
        doomed = tuple(idx for idx, (t, role) in enumerate(zip(state.inst.masks, state.roles))
                       if role == ci and t & C == star_mask)
        keep = [idx for idx in range(state.inst.m) if idx not in set(doomed)]
        new_index = {old: new for new, old in enumerate(keep)}
        inst = Instance(state.inst.n, tuple(state.inst.tests[i] for i in keep), validated=True)
        trace = RuleTrace(PATH_RULE, ci, doomed,
                          detail=f"portion={list(_key(star))} is vertex {pick} of {threshold} "
                                 f"with one signature on a root-leaf path")
        F = tuple(new_index[i] for i in state.greedy.F)
        new_state = normalize_locals(_rebuild(inst, state, F, state.history + (trace,)))
        return new_state, trace
    return None


def _sibling_trigger(tree: ClassTree, need: int):
    for v in tree.preorder():
        kids = tree.children[v]
        if len(kids) < need:
            continue
        groups: dict[tuple, list[frozenset[int]]] = {}
        for w in kids:
            groups.setdefault(canonical_tree_code(tree, w), []).append(w)
        best = None
        for members in groups.values():
            if len(members) >= need and (best is None or _key(members[0]) < _key(best[0])):
                best = members
        if best is not None:
            return v, best
    return None


def apply_sibling_rule(state: FptState) -> tuple[FptState, RuleTrace] | None:
    k = state.k
    need = 2 * k + 2
    for ci in sorted(state.trees):
        tree = state.trees[ci]
        hit = _sibling_trigger(tree, need)
        if hit is None:
            continue
        v, group = hit
        w1 = group[0]
        w1_mask = to_mask(w1)
        C = state.classes.masks[ci]
        doomed = tuple(idx for idx, (t, role) in enumerate(zip(state.inst.masks, state.roles))
                       if role == ci and t & C & ~w1_mask == 0)
        n = state.inst.n
        survivors = [x for x in range(1, n + 1) if x not in w1]
        renumber = {old: new for new, old in enumerate(survivors, start=1)}

        def squeeze(mask: int) -> int:
            out = 0
            for old, new in renumber.items():
                if mask >> (old - 1) & 1:
                    out |= 1 << (new - 1)
            return out

        dead = set(doomed)
        tests: list[int] = []
        where: dict[int, int] = {}
        collapsed = []
        for idx, t in enumerate(state.inst.masks):
            if idx in dead:
                continue
            r = squeeze(t)
            if not r or r in where:
                collapsed.append(idx)
                continue
            where[r] = len(tests)
            tests.append(r)
        F = []
        for f in state.greedy.F:
            r = squeeze(state.inst.masks[f])
            if r not in where:
                raise InconsistencyError(f"greedy test {f + 1} vanished under item deletion")
            F.append(where[r])
        inst = Instance(len(survivors), tuple(from_mask(t) for t in tests))
        report = validate(inst)
        if not report.ok:
            raise InconsistencyError("; ".join(report.problems()))
        detail = (f"parent={list(_key(v))} copies={len(group)} subtree_root={list(_key(w1))}")
        if collapsed:
            detail += f" collapsed={[i + 1 for i in collapsed]}"
        trace = RuleTrace(SIBLING_RULE, ci, doomed, tuple(sorted(w1)), detail,
                          tuple(sorted(renumber.items())))
        new_state = normalize_locals(
            _rebuild(report.instance, state, tuple(F), state.history + (trace,)))
        return new_state, trace
    return None


def signature_bound(classes: int) -> int:
    """Distinct signatures possible in one class when there are ``classes`` classes."""
    return 2 ** (2 ** (classes - 1))


def check_invariants(state: FptState) -> list[str]:
    """Every structural guarantee the rules rely on; returns the violations found."""
    problems = []
    inst = state.inst
    present = set(inst.masks)
    missing = [x for x in range(1, inst.n + 1) if 1 << (x - 1) not in present]
    if missing:
        problems.append(f"singletons missing for items {missing}")
    try:
        roles = state.roles
    except InvariantViolation as exc:
        return problems + [str(exc)]
    classes = state.classes.masks
    in_F = set(state.greedy.F)
    for idx in in_F:
        if roles[idx] is not None:
            problems.append(f"greedy test {idx + 1} splits a greedy class")
    if state.normalized:
        for idx, (t, role) in enumerate(zip(inst.masks, roles)):
            if role is not None and 2 * (t & classes[role]).bit_count() > classes[role].bit_count():
                problems.append(f"test {idx + 1} holds more than half of class {role + 1}")
    if not state.greedy.saturated:
        l, f, k = len(classes), len(state.greedy.F), state.k
        if l > 3 * k - 2:
            problems.append(f"{l} greedy classes exceed 3k-2 = {3 * k - 2}")
        if l > f + k - 1:
            problems.append(f"{l} greedy classes already reach |F|+k = {f + k}")
    try:
        trees = state.trees
    except InvariantViolation as exc:
        return problems + [str(exc)]
    if len(classes) <= 4:
        bound = signature_bound(len(classes))
        for ci, tree in trees.items():
            if len(set(tree.signatures.values())) > bound:
                problems.append(f"class {ci + 1} has more than {bound} signatures")
    return problems


def assert_invariants(state: FptState) -> None:
    problems = check_invariants(state)
    if problems:
        raise InvariantViolation("; ".join(problems))


@dataclass(frozen=True)
class FptResult:
    answer: bool
    reason: str
    traces: tuple[RuleTrace, ...] = ()
    kernel: Instance | None = None
    mini_witness: tuple[int, ...] | None = None
    cover: tuple[frozenset[int], ...] | None = None

    def fires(self, rule: str) -> int:
        return sum(1 for t in self.traces if t.rule == rule)

    @property
    def path_rule_fires(self) -> int:
        return self.fires(PATH_RULE)

    @property
    def sibling_rule_fires(self) -> int:
        return self.fires(SIBLING_RULE)


def fpt_decide(inst: Instance, k: int, *, cap_subsets: int = DEFAULT_CAP_SUBSETS,
               deadline: float | None = None,
               on_state: Callable[[FptState], None] | None = None) -> FptResult:
    """Decide whether ``inst`` has a test cover with at most n - k tests.

    ``cover`` is filled in (as tests of the kernel instance) only when no
    deleting rule fired; lifting a witness through deletions is not supported.
    """
    require_validated(inst)
    if k < 1:
        raise InvalidArgument(f"k must be positive, got {k}")
    closed = add_all_singletons(inst)
    greedy = greedy_mini_test(closed, k)
    if greedy.saturated or greedy.is_mini:
        reason = "greedy-saturated" if greedy.saturated else "greedy-mini"
        cover = extend_partial_to_cover(closed, greedy.F, singletons_only=True)
        return FptResult(True, reason, (), closed, greedy.F,
                         tuple(closed.tests[i] for i in cover))

    state = normalize_locals(FptState(closed, k, greedy))
    assert_invariants(state)
    if on_state:
        on_state(state)
    while True:
        size = state.inst.n + state.inst.m
        fired = apply_path_rule(state) or apply_sibling_rule(state)
        if fired is None:
            break
        state = fired[0]
        if state.inst.n + state.inst.m >= size:
            raise InvariantViolation("a reduction rule fired without shrinking the instance")
        assert_invariants(state)
        if on_state:
            on_state(state)

    witness = find_k_mini_brute(state.inst, k, cap_subsets=cap_subsets, deadline=deadline)
    answer = witness is not None
    cover = None
    deleting = any(t.rule in (PATH_RULE, SIBLING_RULE) for t in state.history)
    if answer and not deleting:
        idx = extend_partial_to_cover(state.inst, witness, singletons_only=True)
        cover = tuple(state.inst.tests[i] for i in idx)
    return FptResult(answer, "kernel", state.history, state.inst, witness, cover)


# Threshold formulas, for reference and telemetry only; the rules above test
# the combinatorial trigger directly.

def f1(k: int) -> int:
    """Depth beyond which a path-rule trigger is guaranteed."""
    return (32 * k - 1) * 2 ** (2 ** (3 * k - 1))


def f3(d: int, k: int, g: Callable[[int, int], int]) -> int:
    """Bound on |S_v| for a vertex of height d; ``g`` counts non-isomorphic subtrees."""
    value = 1
    for level in range(1, d + 1):
        value *= _f2_given(level, k, g, value)
    return value


def _f2_given(d: int, k: int, g, f3_prev: int) -> int:
    return 2 * k * g(d, k) * (2 ** (2 ** (3 * k - 1))) ** (2 * f3_prev - 1)


def f2(d: int, k: int, g: Callable[[int, int], int]) -> int:
    """Out-degree beyond which a sibling-rule trigger is guaranteed."""
    return _f2_given(d, k, g, f3(d - 1, k, g))
