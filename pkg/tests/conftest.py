from __future__ import annotations

import os
import random

import pytest

from testcover.generate import all_instances, gen_random, orbit_representatives

# Outcome of each acceptance criterion, filled in by the report hook below.
CRITERIA: dict[int, tuple[str, str]] = {}

FULL_CORPUS = os.environ.get("TESTCOVER_FULL_CORPUS") == "1"


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        number, title = mark.args
        CRITERIA[number] = ("PASS" if rep.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        verdict, title = CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")


def small_corpus(max_m: int = 6):
    """Every validated instance for n <= 4, one per relabeling orbit for n = 5.

    With TESTCOVER_FULL_CORPUS=1 the n = 5 part is the literal enumeration.
    """
    out = [inst for n in range(1, 5) for inst in all_instances(n, max_m)]
    if FULL_CORPUS:
        out.extend(all_instances(5, max_m))
    else:
        out.extend(orbit_representatives(5, max_m))
    return out


def random_corpus(count: int, max_n: int, max_m: int, seed: int = 2024):
    rng = random.Random(seed)
    out = []
    for s in range(count):
        n = rng.randint(2, max_n)
        m = rng.randint(1, min(max_m, 2 ** n - 1))
        density = rng.choice([0.2, 0.35, 0.5, 0.65, 0.8])
        out.append(gen_random(n, m, density, seed * 100_003 + s)[0])
    return out


@pytest.fixture(scope="session")
def corpus():
    """Exhaustive small instances followed by 600 random ones (n <= 8, m <= 10)."""
    return small_corpus() + random_corpus(600, 8, 10)
