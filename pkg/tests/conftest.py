import functools

import pytest

from maskdisk import catalog
from maskdisk.classify import classify_qutrit_target_set


@functools.lru_cache(maxsize=None)
def _qutrit(example_id, params=()):
    ex = catalog.build(example_id, **dict(params))
    return ex, classify_qutrit_target_set(ex.machine.matrix, ex.spec, seed=0)


@pytest.fixture(scope="session")
def qutrit_verdict():
    """``qutrit_verdict(id, **params) -> (example, TargetStructure)``, cached per session."""

    def get(example_id, **params):
        return _qutrit(example_id, tuple(sorted(params.items())))

    return get


ACCEPTANCE: dict[int, tuple[str, str]] = {}


class _Criterion:
    def __init__(self, number, title):
        self.number, self.title = number, title

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ok = exc_type is None
        prev = ACCEPTANCE.get(self.number, ("PASS", self.title))[0]
        ACCEPTANCE[self.number] = ("PASS" if ok and prev == "PASS" else "FAIL", self.title)
        return False


@pytest.fixture
def criterion():
    """``with criterion(n, title): ...`` records one PASS/FAIL line per acceptance criterion."""
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        status, title = ACCEPTANCE[number]
        terminalreporter.write_line(f"{status} {number:2d}  {title}")
