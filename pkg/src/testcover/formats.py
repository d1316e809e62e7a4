"""Line-oriented text formats.

Instance::

    # optional comments
    testcover <n> <m>
    <ascending 1-based items of test 1>
    ...

Graph: ``graph <p> <q>`` then ``u v`` per edge.  Set cover:
``setcover <ground size> <set count>`` then one line per set with elements
written ``i-j``.
"""
from __future__ import annotations

from pathlib import Path
from typing import Iterator

from .core import Instance, sorted_items
from .errors import InvalidArgument, ParseError
from .reductions import Graph, SetCoverInstance


def _data_lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def _header(lines, token: str, last_line: int) -> tuple[int, int, int]:
    try:
        lineno, line = next(lines)
    except StopIteration:
        raise ParseError(f"missing '{token}' header", last_line) from None
    parts = line.split()
    if len(parts) != 3 or parts[0] != token:
        raise ParseError(f"expected '{token} <a> <b>', got {line!r}", lineno)
    try:
        a, b = int(parts[1]), int(parts[2])
    except ValueError:
        raise ParseError(f"header counts must be integers: {line!r}", lineno) from None
    if a < 0 or b < 0:
        raise ParseError("header counts must be nonnegative", lineno)
    return lineno, a, b


def _ints(line: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise ParseError(f"non-integer token in {line!r}", lineno) from None


def parse_instance(text: str) -> Instance:
    """Parse the instance format; test order is preserved exactly.

    The result is not marked validated: pass it through :func:`validate`
    before handing it to a solver.
    """
    last = text.count("\n") + 1
    lines = _data_lines(text)
    lineno, n, m = _header(lines, "testcover", last)
    if n < 1:
        raise ParseError("n must be at least 1", lineno)
    tests = []
    seen: dict[tuple[int, ...], int] = {}
    for lineno, line in lines:
        if len(tests) == m:
            raise ParseError(f"more than the {m} tests announced in the header", lineno)
        items = _ints(line, lineno)
        for i in items:
            if not 1 <= i <= n:
                raise ParseError(f"item {i} out of range [1, {n}]", lineno)
        if any(a >= b for a, b in zip(items, items[1:])):
            raise ParseError("items must be strictly ascending", lineno)
        key = tuple(items)
        if key in seen:
            raise ParseError(f"duplicate of the test on line {seen[key]}", lineno)
        seen[key] = lineno
        tests.append(frozenset(items))
    if len(tests) != m:
        raise ParseError(f"header announces {m} tests, found {len(tests)}", last)
    return Instance(n, tuple(tests))


def write_instance(inst: Instance, canonical: bool = False) -> str:
    """Serialize; ``canonical`` sorts tests lexicographically."""
    rows = [sorted_items(t) for t in inst.tests]
    if canonical:
        rows.sort()
    out = [f"testcover {inst.n} {inst.m}\n"]
    out.extend(" ".join(map(str, r)) + "\n" for r in rows)
    return "".join(out)


def parse_graph(text: str) -> Graph:
    last = text.count("\n") + 1
    lines = _data_lines(text)
    lineno, p, q = _header(lines, "graph", last)
    edges = []
    seen: dict[tuple[int, int], int] = {}
    for lineno, line in lines:
        if len(edges) == q:
            raise ParseError(f"more than the {q} edges announced in the header", lineno)
        ends = _ints(line, lineno)
        if len(ends) != 2:
            raise ParseError("an edge line needs exactly two vertices", lineno)
        u, v = ends
        for x in (u, v):
            if not 1 <= x <= p:
                raise ParseError(f"vertex {x} out of range [1, {p}]", lineno)
        if u == v:
            raise ParseError(f"self-loop at vertex {u}", lineno)
        e = (min(u, v), max(u, v))
        if e in seen:
            raise ParseError(f"duplicate of the edge on line {seen[e]}", lineno)
        seen[e] = lineno
        edges.append(e)
    if len(edges) != q:
        raise ParseError(f"header announces {q} edges, found {len(edges)}", last)
    return Graph(p, tuple(edges))


def write_graph(g: Graph) -> str:
    return f"graph {g.p} {g.q}\n" + "".join(f"{u} {v}\n" for u, v in g.edges)


def _element(e) -> str:
    if isinstance(e, tuple):
        return "-".join(map(str, e))
    return str(e)


def _element_key(e):
    return e if isinstance(e, tuple) else (e,)


def write_setcover(sc: SetCoverInstance) -> str:
    if not sc.is_covering:
        raise InvalidArgument("only covering instances can be written")
    out = [f"setcover {len(sc.ground)} {len(sc.sets)}\n"]
    for s in sc.sets:
        out.append(" ".join(_element(e) for e in sorted(s, key=_element_key)) + "\n")
    return "".join(out)


def parse_setcover(text: str) -> SetCoverInstance:
    """Inverse of :func:`write_setcover`; the ground set is the union of the sets."""
    raw_lines = text.splitlines()
    last = len(raw_lines)
    it = ((i, ln.strip()) for i, ln in enumerate(raw_lines, start=1)
          if not ln.strip().startswith("#"))
    header = None
    sets = []
    for lineno, line in it:
        if header is None:
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3 or parts[0] != "setcover":
                raise ParseError(f"expected 'setcover <g> <s>', got {line!r}", lineno)
            try:
                header = (int(parts[1]), int(parts[2]))
            except ValueError:
                raise ParseError("header counts must be integers", lineno) from None
            continue
        if len(sets) == header[1]:
            if line:
                raise ParseError("more sets than announced", lineno)
            continue
        elems = []
        for tok in line.split():
            try:
                elems.append(tuple(int(x) for x in tok.split("-")) if "-" in tok else int(tok))
            except ValueError:
                raise ParseError(f"bad element {tok!r}", lineno) from None
        sets.append(frozenset(elems))
    if header is None:
        raise ParseError("missing 'setcover' header", last)
    if len(sets) != header[1]:
        raise ParseError(f"header announces {header[1]} sets, found {len(sets)}", last)
    ground = set().union(*sets) if sets else set()
    if len(ground) != header[0]:
        raise ParseError(f"header announces {header[0]} elements, sets cover {len(ground)}", last)
    return SetCoverInstance(tuple(sorted(ground, key=_element_key)), tuple(sets))


def read_instance(path: str | Path) -> Instance:
    return parse_instance(Path(path).read_text())


def read_graph(path: str | Path) -> Graph:
    return parse_graph(Path(path).read_text())
