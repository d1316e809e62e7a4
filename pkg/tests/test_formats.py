from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from testcover.core import Instance, validate
from testcover.errors import InvalidArgument, ParseError
from testcover.formats import (parse_graph, parse_instance, parse_setcover, write_graph,
                               write_instance, write_setcover)
from testcover.generate import (all_instances, binary_split_instance, chain_instance, gen_random,
                                gen_random_graph, orbit_representatives)
from testcover.reductions import tc_to_sc


def test_parse_examples():
    assert parse_instance("testcover 2 1\n1\n") == Instance(2, (frozenset({1}),))
    split = parse_instance("testcover 4 2\n1 2\n1 3\n")
    assert split == binary_split_instance(2)
    assert validate(split).ok and not split.validated


def test_comments_and_blank_lines():
    text = "# a comment\n\ntestcover 3 2\n# inside\n1\n\n2 3\n"
    assert parse_instance(text).tests == (frozenset({1}), frozenset({2, 3}))


@pytest.mark.parametrize("text,line,fragment", [
    ("testcover 2 1\n3\n", 2, "out of range"),
    ("testcover 3 1\n2 1\n", 2, "ascending"),
    ("testcover 3 2\n1\n1\n", 3, "duplicate"),
    ("testcover 3 2\n1\n", 3, "announces 2"),
    ("testcover 3 1\n1\n2\n", 3, "more than"),
    ("tc 3 1\n1\n", 1, "expected"),
    ("testcover x 1\n1\n", 1, "integers"),
    ("testcover 3 1\n1 a\n", 2, "non-integer"),
    ("", 1, "missing"),
])
def test_parse_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(ParseError) as err:
        parse_instance(text)
    assert err.value.line == line
    assert fragment in str(err.value)
    assert str(err.value).startswith(f"line {line}:")


def test_parse_preserves_order_and_canonical_sorts():
    inst = parse_instance("testcover 3 2\n2 3\n1\n")
    assert inst.tests == (frozenset({2, 3}), frozenset({1}))
    assert write_instance(inst) == "testcover 3 2\n2 3\n1\n"
    assert write_instance(inst, canonical=True) == "testcover 3 2\n1\n2 3\n"


def test_graph_examples():
    g = parse_graph("graph 3 3\n1 2\n2 3\n1 3\n")
    assert g.p == 3 and g.q == 3
    with pytest.raises(ParseError, match="self-loop"):
        parse_graph("graph 2 1\n1 1\n")
    with pytest.raises(ParseError, match="duplicate") as err:
        parse_graph("graph 3 2\n1 2\n1 2\n")
    assert err.value.line == 3
    assert parse_graph(write_graph(g)) == g


def test_setcover_round_trip():
    sc = tc_to_sc(Instance.of(4, [{1, 2}, {1, 3}]))
    text = write_setcover(sc)
    assert text.splitlines()[0] == "setcover 6 2"
    assert text.splitlines()[1] == "1-3 1-4 2-3 2-4"
    back = parse_setcover(text)
    assert back.sets == sc.sets and set(back.ground) == set(sc.ground)


def test_gen_examples():
    inst, appended = gen_random(1, 1, 0.5, 3)
    assert inst.tests == (frozenset({1}),) and appended == 0
    assert gen_random(6, 4, 0.5, 42) == gen_random(6, 4, 0.5, 42)
    inst, _ = gen_random(6, 4, 0.5, 42)
    assert validate(inst).ok and inst.m >= 4


@pytest.mark.parametrize("args", [(0, 1, 0.5, 1), (3, 8, 0.5, 1), (3, 2, 0.0, 1), (3, 2, 1.0, 1),
                                  (3, -1, 0.5, 1)])
def test_gen_rejects(args):
    with pytest.raises(InvalidArgument):
        gen_random(*args)


def test_gen_full_family():
    inst, appended = gen_random(3, 7, 0.5, 9)
    assert inst.m == 7 and appended == 0


def test_corpus_counts():
    # Literal counts of validated instances with m <= 6, by n.
    assert [sum(1 for _ in all_instances(n, 6)) for n in (1, 2, 3)] == [2, 6, 107]
    assert sum(1 for _ in all_instances(4, 6)) == 9263


def test_orbits_cover_every_instance_up_to_relabeling():
    from itertools import permutations

    def canon(inst):
        best = None
        for perm in permutations(range(1, inst.n + 1)):
            img = tuple(sorted(tuple(sorted(perm[i - 1] for i in t)) for t in inst.tests))
            best = img if best is None or img < best else best
        return best

    literal = {canon(i) for i in all_instances(4, 4)}
    reps = [canon(i) for i in orbit_representatives(4, 4)]
    assert len(reps) == len(set(reps)) and set(reps) == literal


def test_chain_and_split_shapes():
    assert chain_instance(4).tests == tuple(frozenset({i}) for i in range(1, 4))
    assert binary_split_instance(3).tests == (frozenset({1, 2, 3, 4}), frozenset({1, 2, 5, 6}),
                                              frozenset({1, 3, 5, 7}))


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 10), st.integers(0, 20), st.floats(0.05, 0.95), st.integers(0, 10 ** 6))
def test_generator_output_round_trips(n, m, density, seed):
    inst, appended = gen_random(n, min(m, 2 ** n - 1), density, seed)
    assert validate(inst).ok
    assert inst.m == min(m, 2 ** n - 1) + appended
    text = write_instance(inst, canonical=True)
    back = parse_instance(text)
    assert write_instance(back) == text
    assert set(back.tests) == set(inst.tests)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 8), st.floats(0.1, 0.9), st.integers(0, 10 ** 6))
def test_graph_round_trip(p, prob, seed):
    g = gen_random_graph(p, prob, seed)
    assert parse_graph(write_graph(g)) == g
