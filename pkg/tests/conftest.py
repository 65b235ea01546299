from __future__ import annotations

from pathlib import Path
from time import perf_counter

import pytest

DATA = Path(__file__).parent / "data"

_ACCEPTANCE: list[str] = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE.append(line)
    print(line)


_BUILD: dict[str, float] = {}


@pytest.fixture(scope="session")
def gens():
    from hermtheta.graded_ring import build_generators

    t0 = perf_counter()
    g = build_generators(6)
    _BUILD.setdefault("seconds", perf_counter() - t0)
    return g


@pytest.fixture(scope="session")
def gens_seconds(gens) -> float:
    """Wall time of the first generator build in this session."""
    return _BUILD["seconds"]


@pytest.fixture(scope="session")
def g4():
    from hermtheta.theta import load_gram

    return load_gram(DATA / "g4.gram")


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
