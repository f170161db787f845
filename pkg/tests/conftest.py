import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    # keep test runs from touching a user cache directory
    monkeypatch.setenv("DIFFSQUARES_CACHE", str(tmp_path / "cache"))


# acceptance criteria: one PASS/FAIL line each in the terminal summary
_CRITERIA: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    n = mark.args[0]
    entry = _CRITERIA.setdefault(n, [True, []])
    if rep.when == "setup" and not rep.passed:
        entry[0] = False
    if rep.when == "call":
        xfail = hasattr(rep, "wasxfail")
        if rep.failed or (rep.skipped and not xfail):
            entry[0] = False
        entry[1].append(f"{item.name}: {'xfail' if xfail else rep.outcome}")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, parts = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  ({'; '.join(parts)})")
