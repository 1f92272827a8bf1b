from pathlib import Path

import numpy as np
import pytest

from genai_duopoly.market import Scenario, Task, scenario_from_kappas

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"
GOLDEN = Path(__file__).resolve().parent / "golden"

_acceptance_results = []


def random_exponential_scenario(rng, max_tasks=8):
    """Random instance drawn as in the oracle-equivalence property."""
    T = int(rng.integers(1, max_tasks + 1))
    tasks = [
        Task(f"t{i}", float(rng.uniform(1, 500)), float(rng.uniform(0.05, 0.95)), float(rng.uniform(0.05, 0.95)))
        for i in range(T)
    ]
    return Scenario(tuple(tasks), float(rng.uniform(0.1, 2.0)))


def random_two_task_scenario(rng):
    while True:
        s = random_exponential_scenario(rng, max_tasks=2)
        if s.num_tasks == 2:
            return s


@pytest.fixture
def figure2():
    return scenario_from_kappas([3, 2, 1], [100, 200, 400], 0.5)


@pytest.fixture
def high_price():
    return scenario_from_kappas([1.0, 0.2], [100, 100], 1.0)


@pytest.fixture
def infeasible_pair():
    return scenario_from_kappas([1.0, 0.6], [100, 100], 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    status = "PASS" if call.excinfo is None else "FAIL"
    _acceptance_results.append((marker.kwargs.get("criterion"), marker.kwargs.get("title", item.name), status))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for crit, title, status in sorted(_acceptance_results, key=lambda r: (r[0] or 0, r[1])):
        terminalreporter.write_line(f"[{status}] criterion {crit}: {title}")

