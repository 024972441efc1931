import time

import numpy as np
import pytest
from hypothesis import settings

from beurling_morrey.grid import make_grid

settings.register_profile("default", deadline=None, max_examples=25)
settings.load_profile("default")


@pytest.fixture(scope="session")
def g256():
    return make_grid(256, 4.0)


@pytest.fixture(scope="session")
def g128():
    return make_grid(128, 4.0)


@pytest.fixture(scope="session")
def g64():
    return make_grid(64, 4.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance reporting: one pass/fail line per criterion

_CRITERIA = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_CRITERIA] = {}


class _Criterion:
    def __init__(self, store, number, title, limit):
        self.store, self.number, self.title, self.limit = store, number, title, limit
        self.details = []

    def note(self, text):
        self.details.append(str(text))

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        dt = time.perf_counter() - self.t0
        ok = exc_type is None and dt < self.limit
        why = "; ".join(self.details)
        if exc_type is not None:
            why = f"{exc_type.__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        self.store[(self.number, self.title)] = (ok, dt, self.limit, why)
        if exc_type is None and dt >= self.limit:
            raise AssertionError(f"criterion {self.number} took {dt:.1f}s, limit {self.limit}s")
        return False


@pytest.fixture
def criterion(request):
    store = request.config.stash[_CRITERIA]
    return lambda number, title, limit: _Criterion(store, number, title, limit)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_CRITERIA, {})
    if not store:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for (k, title) in sorted(store):
        ok, dt, limit, why = store[(k, title)]
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] {k:2d}. {title} ({dt:.1f}s, limit {limit:g}s) {why}")
