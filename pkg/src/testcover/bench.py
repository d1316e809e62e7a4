"""Batch runner: every solver on every instance file and every k, as CSV."""
from __future__ import annotations

import csv
import io
import time
from multiprocessing import Pool
from pathlib import Path
from typing import Iterable, Sequence

from .core import validate
from .errors import ParseError, ResourceLimitError, SearchTimeout
from .exact import DEFAULT_CAP_M, find_k_mini_brute, min_test_cover_exact
from .formats import read_instance
from .fpt import fpt_decide
from .greedy import greedy_setcover_approx

COLUMNS = ("id", "n", "m", "k", "solver", "answer", "size", "micros",
           "path_rule_fires", "sibling_rule_fires")
SOLVERS = ("exact", "fpt", "mini", "greedy")
DEFAULT_TIMEOUT_MS = 10_000


def _yes(flag: bool) -> str:
    return "YES" if flag else "NO"


def run_one(path: str, solver: str, k: int, timeout_ms: int = DEFAULT_TIMEOUT_MS,
            cap_m: int = DEFAULT_CAP_M) -> dict:
    row = dict.fromkeys(COLUMNS, "")
    row.update(id=Path(path).stem, k=k, solver=solver)
    try:
        inst = read_instance(path)
    except (OSError, UnicodeDecodeError, ParseError):
        row["answer"] = "parse_error"
        return row
    row.update(n=inst.n, m=inst.m)
    report = validate(inst)
    if not report.ok:
        row["answer"] = "invalid"
        return row
    inst = report.instance
    start = time.perf_counter()
    deadline = time.monotonic() + timeout_ms / 1000
    try:
        if solver == "exact":
            res = min_test_cover_exact(inst, cap_m=cap_m, deadline=deadline)
            row.update(answer=_yes(res.optimum <= inst.n - k), size=res.optimum)
        elif solver == "fpt":
            res = fpt_decide(inst, k, deadline=deadline)
            row.update(answer=_yes(res.answer),
                       size=len(res.cover) if res.cover is not None else "",
                       path_rule_fires=res.path_rule_fires,
                       sibling_rule_fires=res.sibling_rule_fires)
        elif solver == "mini":
            wit = find_k_mini_brute(inst, k, deadline=deadline)
            row.update(answer=_yes(wit is not None), size=len(wit) if wit is not None else "")
        elif solver == "greedy":
            chosen = greedy_setcover_approx(inst)
            row.update(answer="YES" if len(chosen) <= inst.n - k else "UNKNOWN",
                       size=len(chosen))
        else:
            raise ValueError(f"unknown solver {solver!r}")
    except SearchTimeout:
        row["answer"] = "timeout"
    except ResourceLimitError:
        row["answer"] = "resource_limit"
    row["micros"] = int((time.perf_counter() - start) * 1e6)
    return row


def _run_job(job):
    return run_one(*job)


def instance_files(directory: str | Path) -> list[Path]:
    return sorted(p for p in Path(directory).iterdir()
                  if p.is_file() and not p.name.startswith("."))


def run_bench(directory: str | Path, ks: Iterable[int], solvers: Sequence[str] = ("exact", "fpt"),
              *, timeout_ms: int = DEFAULT_TIMEOUT_MS, cap_m: int = DEFAULT_CAP_M,
              workers: int = 1) -> str:
    """CSV text, rows ordered by (file, solver, k) whatever the pool size."""
    ks = list(ks)
    for s in solvers:
        if s not in SOLVERS:
            raise ValueError(f"unknown solver {s!r}; choose from {', '.join(SOLVERS)}")
    jobs = [(str(path), s, k, timeout_ms, cap_m)
            for path in instance_files(directory) for s in solvers for k in ks]
    if workers > 1 and jobs:
        with Pool(workers) as pool:
            rows = pool.map(_run_job, jobs)
    else:
        rows = [_run_job(j) for j in jobs]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
