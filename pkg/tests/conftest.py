from __future__ import annotations

import functools

import pytest

from corpus import build_corpus
from unilyap.matcore import MatTuple

ELEMENTARY = [
    [[1, 0], [0, 0]],
    [[0, 1], [0, 0]],
    [[0, 0], [1, 0]],
    [[0, 0], [0, 1]],
]


@functools.lru_cache(maxsize=1)
def corpus():
    return tuple(build_corpus())


@pytest.fixture(scope="session")
def cases():
    return corpus()


@pytest.fixture
def E():
    return MatTuple.from_entries(ELEMENTARY)


@pytest.fixture
def scalar():
    return MatTuple.from_entries([[[2]], [[1]]])


@pytest.fixture
def golden():
    return MatTuple.from_entries([[[1, 1], [0, 0]], [[0, 0], [1, 0]]])


ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = {}


@pytest.fixture
def acceptance(request):
    """Record ``(passed, detail, seconds)`` for an acceptance criterion."""
    return request.config.stash[ACCEPTANCE_KEY]


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(ACCEPTANCE_KEY, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        passed, detail, seconds = results[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}  ({seconds:.2f} s)")
