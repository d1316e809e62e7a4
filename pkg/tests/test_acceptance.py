"""Acceptance suite.  One test per criterion; the terminal summary prints PASS/FAIL lines.

The exhaustive corpus is every validated instance with n <= 4, m <= 6 plus one
instance per item-relabeling orbit for n = 5, m <= 6 (set
TESTCOVER_FULL_CORPUS=1 for the literal n = 5 enumeration), plus 600 seeded
random instances with n <= 8, m <= 10.
"""
from __future__ import annotations

import csv
import io
import itertools
import random
import time
from dataclasses import dataclass, field

import pytest

from conftest import random_corpus
from testcover import bench, cli
from testcover.core import Instance, add_all_singletons, is_test_cover
from testcover.exact import (decide_nk_brute, find_k_mini_brute, log_lower_bound,
                             min_test_cover_exact)
from testcover.formats import write_instance
from testcover.fpt import (FptState, apply_path_rule, apply_sibling_rule, check_invariants,
                           fpt_decide, prepare_state)
from testcover.generate import (all_graphs, binary_split_instance, chain_instance, gen_random,
                                nested_chain_family, orbit_representatives,
                                replicated_subtree_family)
from testcover.greedy import extend_partial_to_cover, greedy_mini_test, greedy_setcover_approx
from testcover.reductions import (independence_number, is_to_tc, min_set_cover_exact,
                                  min_vertex_cover_exact, tc_to_sc)

KS = (1, 2, 3)


@dataclass
class Run:
    inst: Instance
    optimum: int
    brute: dict = field(default_factory=dict)
    mini: dict = field(default_factory=dict)
    fpt: dict = field(default_factory=dict)
    states: dict = field(default_factory=dict)


@pytest.fixture(scope="session")
def runs(corpus):
    out = []
    for inst in corpus:
        run = Run(inst, min_test_cover_exact(inst).optimum)
        for k in KS:
            run.brute[k] = decide_nk_brute(inst, k)
            run.mini[k] = find_k_mini_brute(inst, k)
            seen: list[FptState] = []
            run.fpt[k] = fpt_decide(inst, k, on_state=seen.append)
            run.states[k] = seen
        out.append(run)
    return out


def _report(name, bad, total):
    print(f"{name}: {len(bad)} violations over {total} checks")
    for b in bad[:5]:
        print("  ", b)


@pytest.mark.criterion(1, "brute n-k decision agrees with k-mini search")
def test_criterion_1_equivalence(runs):
    start = time.perf_counter()
    bad = [(r.inst, k) for r in runs for k in KS if r.brute[k] != (r.mini[k] is not None)]
    _report("criterion 1", bad, len(runs) * len(KS))
    assert len(runs) >= 500
    assert not bad
    assert time.perf_counter() - start < 300


def _single_gain(classes, t):
    return len(partition_masks_from(classes, [t])) - len(classes)


def partition_masks_from(classes, tests):
    out = list(classes)
    for t in tests:
        nxt = []
        for c in out:
            a, b = c & t, c & ~t
            nxt.extend(x for x in (a, b) if x)
        out = nxt
    return out


@pytest.mark.criterion(2, "greedy terminal states: saturated are k-mini, unsaturated admit no step")
def test_criterion_2_greedy_terminal():
    instances = random_corpus(1000, 9, 12, seed=77)
    bad, checks = [], 0
    for inst in instances:
        for k in (1, 2, 3, 4):
            st = greedy_mini_test(inst, k)
            checks += 1
            nF, ncl = len(st.F), len(st.classes)
            if st.saturated:
                if not (nF <= 2 * k and ncl >= nF + k):
                    bad.append((inst, k, "saturated but not k-mini"))
                continue
            classes = list(st.classes.masks)
            rest = [i for i in range(inst.m) if i not in st.F]
            masks = inst.masks
            for i in rest:
                if _single_gain(classes, masks[i]) >= 2:
                    bad.append((inst, k, f"single step {i}"))
            for i, j in itertools.combinations(rest, 2):
                if len(partition_masks_from(classes, [masks[i], masks[j]])) - len(classes) >= 3:
                    bad.append((inst, k, f"pair step {i},{j}"))
    _report("criterion 2", bad, checks)
    assert checks >= 4000
    assert not bad


@pytest.mark.criterion(3, "extension of a greedy state yields a cover of size <= n-k")
def test_criterion_3_extension(runs):
    bad, checks = [], 0
    for r in runs:
        closed = add_all_singletons(r.inst)
        for k in KS:
            for base in (r.inst, closed):
                st = greedy_mini_test(base, k)
                if len(st.classes) < len(st.F) + k:
                    continue
                checks += 1
                cover = extend_partial_to_cover(base, st.F)
                if not (is_test_cover(base, cover) and len(cover) <= base.n - k
                        and set(st.F) <= set(cover)):
                    bad.append((base, k, "default mode", cover))
                if base is closed:
                    cover = extend_partial_to_cover(base, st.F, singletons_only=True)
                    added = set(cover) - set(st.F)
                    if not (is_test_cover(base, cover) and len(cover) <= base.n - k
                            and all(len(base.tests[i]) == 1 for i in added)):
                        bad.append((base, k, "singletons only", cover))
    _report("criterion 3", bad, checks)
    assert checks > 0
    assert not bad


def _rule_families():
    """Constructed trigger families: (instance, k, explicit greedy family or None)."""
    fams = []
    inst, F = nested_chain_family(1)
    fams.append((inst, 1, F))
    inst, F = nested_chain_family(1, alternate=True)
    fams.append((inst, 1, F))
    for copies, block, extra, seed in [(4, 2, 0, 0), (4, 3, 1, 1), (5, 2, 0, 2), (6, 1, 0, 0),
                                       (6, 2, 0, 3), (7, 1, 0, 0), (6, 1, 2, 4), (7, 2, 0, 5)]:
        inst = replicated_subtree_family(copies, block, extra, seed)
        for k in (1, 2):
            fams.append((inst, k, None))
    return fams


def _family_chains():
    """Every state sequence the fixpoint loop walks through on the constructed families."""
    chains = []
    for inst, k, F in _rule_families():
        state = prepare_state(inst, k, F)
        seq = [state]
        while True:
            fired = apply_path_rule(state) or apply_sibling_rule(state)
            if fired is None:
                break
            state = fired[0]
            seq.append(state)
        chains.append((inst, k, seq))
    return chains


@pytest.fixture(scope="module")
def family_chains():
    return _family_chains()


@pytest.mark.criterion(4, "post-normalization laminarity and tree invariants hold")
def test_criterion_4_invariants(runs, family_chains):
    bad, checks = [], 0
    for r in runs:
        for k in KS:
            for st in r.states[k]:
                checks += 1
                problems = check_invariants(st)
                if problems:
                    bad.append((r.inst, k, problems))
    for inst, k, seq in family_chains:
        for st in seq:
            checks += 1
            # Constructed states carry a chosen F, so the greedy class-count bounds do not apply.
            problems = [p for p in check_invariants(st) if "greedy classes" not in p]
            if problems:
                bad.append((inst, k, problems))
    _report("criterion 4", bad, checks)
    assert checks > 0
    assert not bad


@pytest.mark.criterion(5, "rule firings preserve the answer; fpt agrees with brute force")
def test_criterion_5_rule_safety(runs, family_chains):
    bad, firings = [], {"path": 0, "sibling": 0}
    for inst, k, seq in family_chains:
        answers = [find_k_mini_brute(st.inst, k) is not None for st in seq]
        if len(set(answers)) > 1:
            bad.append((inst, k, answers))
        for st in seq[1:]:
            firings[st.history[-1].rule] += 1
    corpus_firings = 0
    for r in runs:
        for k in KS:
            seq = r.states[k]
            answers = [find_k_mini_brute(st.inst, k) is not None for st in seq]
            corpus_firings += len(seq) - 1 if seq else 0
            if seq and len(set(answers)) > 1:
                bad.append((r.inst, k, "firing changed the answer"))
            if r.fpt[k].answer != r.brute[k]:
                bad.append((r.inst, k, "fpt disagrees with brute force"))
    print(f"family firings {firings}, corpus firings {corpus_firings}")
    _report("criterion 5", bad, len(runs) * len(KS))
    assert firings["path"] >= 1 and firings["sibling"] >= 1
    assert not bad


def _tc_vs_sc_instances():
    out = [inst for n in range(1, 5) for inst in orbit_representatives(n, 7)]
    out += list(orbit_representatives(5, 6))
    rng = random.Random(6)
    for s in range(300):
        n = rng.choice([5, 6])
        m = 7 if n == 5 else rng.randint(1, 7)
        out.append(gen_random(n, m, rng.choice([0.3, 0.5, 0.7]), 9000 + s)[0])
    return out


@pytest.mark.criterion(6, "independent-set and set-cover reductions preserve sizes")
def test_criterion_6_reductions():
    start = time.perf_counter()
    bad, checks = [], 0
    for p in range(2, 6):
        for g in all_graphs(p, min_q=2):
            inst, mapping = is_to_tc(g)
            opt = min_test_cover_exact(inst).optimum
            vc = min_vertex_cover_exact(g)
            checks += 1
            if opt != g.q - 1 + vc:
                bad.append((g, opt, vc))
            alpha = independence_number(g)
            for k in (1, 2, 3):
                achievable = opt <= mapping.nominal_tests - k
                if achievable != (alpha >= k):
                    bad.append((g, k, achievable, alpha))
    for inst in _tc_vs_sc_instances():
        checks += 1
        sc = tc_to_sc(inst)
        if len(min_set_cover_exact(sc)) != min_test_cover_exact(inst).optimum:
            bad.append(inst)
    _report("criterion 6", bad, checks)
    assert not bad
    assert time.perf_counter() - start < 600


@pytest.mark.criterion(7, "log n <= optimum <= n-1, tight on chains and binary splits")
def test_criterion_7_bounds(runs):
    bad = [r.inst for r in runs if not log_lower_bound(r.inst.n) <= r.optimum <= max(r.inst.n - 1, 0)]
    for n in range(2, 7):
        if min_test_cover_exact(chain_instance(n)).optimum != n - 1:
            bad.append(("chain", n))
    for t in (1, 2, 3):
        for singletons in (False, True):
            if min_test_cover_exact(binary_split_instance(t, singletons)).optimum != t:
                bad.append(("binary split", t, singletons))
    _report("criterion 7", bad, len(runs) + 11)
    assert not bad


def _solver_outputs(inst, workers):
    out = [repr(min_test_cover_exact(inst, workers=workers))]
    for k in (1, 2, 3):
        out.append(repr(find_k_mini_brute(inst, k, workers=workers)))
        out.append(repr(decide_nk_brute(inst, k, workers=workers)))
        res = fpt_decide(inst, k)
        out.append(repr((res.answer, res.reason, res.traces, res.kernel, res.mini_witness,
                         res.cover)))
        st = greedy_mini_test(inst, k)
        out.append(repr((st, extend_partial_to_cover(inst, st.F))))
    out.append(repr(greedy_setcover_approx(inst)))
    return "\n".join(out)


def _strip_micros(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    for row in rows:
        row.pop("micros")
    return rows


@pytest.mark.criterion(8, "byte-identical outputs across runs and worker counts 1 and 4")
def test_criterion_8_determinism(tmp_path, capsys):
    bad = []
    gens = [write_instance(gen_random(n, m, d, s)[0])
            for n, m, d, s in [(6, 8, 0.4, 1), (8, 10, 0.5, 2), (10, 12, 0.3, 3), (12, 18, 0.5, 4)]]
    again = [write_instance(gen_random(n, m, d, s)[0])
             for n, m, d, s in [(6, 8, 0.4, 1), (8, 10, 0.5, 2), (10, 12, 0.3, 3), (12, 18, 0.5, 4)]]
    if gens != again:
        bad.append("generator")
    instances = [gen_random(n, m, d, s)[0]
                 for n, m, d, s in [(6, 8, 0.4, 1), (8, 10, 0.5, 2), (10, 12, 0.3, 3),
                                    (12, 18, 0.5, 4)]]
    instances.append(replicated_subtree_family(6, 2, 0, 3))
    for inst in instances:
        a = _solver_outputs(inst, 1)
        b = _solver_outputs(inst, 1)
        c = _solver_outputs(inst, 4)
        if not a == b == c:
            bad.append(("solvers", inst))
    for i, text in enumerate(gens):
        (tmp_path / f"g{i}.txt").write_text(text)
    (tmp_path / "broken.txt").write_text("testcover 2 1\n3\n")
    csvs = [bench.run_bench(tmp_path, [1, 2], bench.SOLVERS, workers=w) for w in (1, 1, 4)]
    if not _strip_micros(csvs[0]) == _strip_micros(csvs[1]) == _strip_micros(csvs[2]):
        bad.append("bench")
    cli_out = []
    for _ in range(2):
        cli.main(["gen", "--n", "7", "--m", "9", "--density", "0.4", "--seed", "11"])
        cli_out.append(capsys.readouterr().out)
    if cli_out[0] != cli_out[1]:
        bad.append("cli gen")
    _report("criterion 8", bad, len(instances) * 3 + 4)
    assert not bad
