"""Command-line entry point.  Exit status: 0 yes/success, 1 no, 2 error."""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .bench import DEFAULT_TIMEOUT_MS, SOLVERS, run_bench
from .core import Instance, sorted_items, validate
from .errors import CoverError
from .exact import (DEFAULT_CAP_M, decide_k_param, decide_nk_brute, find_k_mini_brute,
                    min_test_cover_exact)
from .formats import read_graph, read_instance, write_instance, write_setcover
from .fpt import fpt_decide
from .generate import gen_random
from .greedy import greedy_setcover_approx
from .reductions import is_to_tc, tc_to_sc

YES, NO, ERROR = 0, 1, 2


def _load(path: str) -> Instance:
    report = validate(read_instance(path))
    if not report.ok:
        raise CoverError(f"{path}: " + "; ".join(report.problems()))
    return report.instance


def _deadline(args) -> float:
    return time.monotonic() + args.timeout_ms / 1000


def _print_tests(inst: Instance, refs) -> None:
    for r in refs:
        print(f"{r + 1}: {' '.join(map(str, sorted_items(inst.tests[r])))}")


def cmd_validate(args) -> int:
    report = validate(read_instance(args.file))
    if report.ok:
        print(f"valid test cover: n={report.instance.n} m={report.instance.m}")
        return YES
    for problem in report.problems():
        print(problem)
    return NO


def cmd_solve(args) -> int:
    inst = _load(args.file)
    if args.method == "exact":
        res = min_test_cover_exact(inst, cap_m=args.cap_m, workers=args.workers,
                                   deadline=_deadline(args))
        print(f"optimum {res.optimum}")
        _print_tests(inst, res.witness)
    else:
        chosen = greedy_setcover_approx(inst)
        print(f"size {len(chosen)}")
        _print_tests(inst, chosen)
    return YES


def cmd_decide(args) -> int:
    inst = _load(args.file)
    if args.param == "k":
        answer = decide_k_param(inst, args.k, deadline=_deadline(args))
        print("YES" if answer else "NO")
        return YES if answer else NO
    answers = {}
    if args.mode in ("fpt", "both"):
        res = fpt_decide(inst, args.k, deadline=_deadline(args))
        if args.trace:
            for t in res.traces:
                print(t.line())
        answers["fpt"] = res.answer
    if args.mode in ("brute", "both"):
        answers["brute"] = decide_nk_brute(inst, args.k, cap_m=args.cap_m,
                                           workers=args.workers, deadline=_deadline(args))
    if len(set(answers.values())) > 1:
        print(f"DISAGREE {answers}", file=sys.stderr)
        return ERROR
    answer = next(iter(answers.values()))
    print("YES" if answer else "NO")
    return YES if answer else NO


def cmd_mini(args) -> int:
    inst = _load(args.file)
    wit = find_k_mini_brute(inst, args.k, workers=args.workers, deadline=_deadline(args))
    if wit is None:
        print("NO")
        return NO
    print(f"YES {len(wit)}")
    _print_tests(inst, wit)
    return YES


def cmd_reduce(args) -> int:
    if args.kind == "is2tc":
        g = read_graph(args.file)
        inst, mapping = is_to_tc(g)
        print(f"# from graph p={g.p} q={g.q}; cover of size q-1+t iff vertex cover of size t")
        print(f"# nominal test count q-1+p = {mapping.nominal_tests}")
        if mapping.isolated:
            print(f"# isolated vertices omitted: {' '.join(map(str, mapping.isolated))}")
        if mapping.merged:
            pairs = " ".join(f"{v}={w}" for v, w in sorted(mapping.merged.items()))
            print(f"# vertices sharing a test: {pairs}")
        sys.stdout.write(write_instance(inst))
    else:
        sys.stdout.write(write_setcover(tc_to_sc(_load(args.file))))
    return YES


def cmd_gen(args) -> int:
    inst, appended = gen_random(args.n, args.m, args.density, args.seed)
    if appended:
        print(f"appended {appended} singleton(s) to reach a test cover", file=sys.stderr)
    sys.stdout.write(write_instance(inst, canonical=args.canonical))
    return YES


def cmd_bench(args) -> int:
    ks = [int(x) for x in args.k.split(",") if x]
    solvers = [s for s in args.solvers.split(",") if s]
    text = run_bench(args.dir, ks, solvers, timeout_ms=args.timeout_ms, cap_m=args.cap_m,
                     workers=args.workers)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return YES


def build_parser() -> argparse.ArgumentParser:
    limits = argparse.ArgumentParser(add_help=False)
    limits.add_argument("--cap-m", type=int, default=DEFAULT_CAP_M,
                        help="largest test count the exact solver will enumerate")
    limits.add_argument("--timeout-ms", type=int, default=DEFAULT_TIMEOUT_MS)
    limits.add_argument("--workers", type=int, default=1)

    parser = argparse.ArgumentParser(prog="testcover", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check that FILE is a valid test cover instance")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", parents=[limits], help="minimum (exact) or greedy test cover")
    p.add_argument("method", choices=["exact", "greedy"])
    p.add_argument("file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("decide", parents=[limits],
                       help="nk: cover of size <= n-k?  k: cover of size <= k?")
    p.add_argument("param", choices=["nk", "k"])
    p.add_argument("file")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=["fpt", "brute", "both"], default="fpt")
    p.add_argument("--trace", action="store_true", help="print reduction rule firings")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("mini", parents=[limits], help="search for a k-mini test cover")
    p.add_argument("file")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_mini)

    p = sub.add_parser("reduce", help="is2tc GRAPH or tc2sc FILE")
    p.add_argument("kind", choices=["is2tc", "tc2sc"])
    p.add_argument("file")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("gen", help="seeded random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--canonical", action="store_true", help="sort tests lexicographically")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", parents=[limits], help="run solvers over a directory, emit CSV")
    p.add_argument("dir")
    p.add_argument("--k", required=True, help="comma-separated k values")
    p.add_argument("--solvers", default="exact,fpt", help=f"comma-separated from {','.join(SOLVERS)}")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CoverError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
