import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from doxa.io.bundle import load_bundle  # noqa: E402

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "src", "doxa", "fixtures")


def fixture_path(*parts):
    return os.path.normpath(os.path.join(FIXTURES, *parts))


_cache = {}


def bundle(name):
    """Running-example or acceleration bundle by manifest stem (cached)."""
    if name not in _cache:
        for sub in ("running", "acceleration"):
            p = fixture_path(sub, name + ".doxa")
            if os.path.exists(p):
                _cache[name] = load_bundle(p)[0]
                break
        else:
            raise KeyError(name)
    return _cache[name]


@pytest.fixture
def switched():
    return bundle("initially-switched")


@pytest.fixture
def design_world(switched):
    return switched.world


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
