import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", deadline=None, max_examples=1000, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

import pytest

# acceptance criteria: one PASS/FAIL line each, derived from the real test outcomes
_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(key, text): acceptance criterion exercised by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not (rep.when == "call" or rep.failed or rep.skipped):
        return
    key, text = mark.args
    passed = rep.passed and not hasattr(rep, "wasxfail")
    entry = _CRITERIA.setdefault(str(key), {"text": text, "ok": True, "notes": []})
    if not passed:
        entry["ok"] = False
        entry["notes"].append(f"{item.name}: {'expected failure' if hasattr(rep, 'wasxfail') else rep.outcome}")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: (int("".join(c for c in k if c.isdigit())), k)):
        e = _CRITERIA[key]
        line = f"{'PASS' if e['ok'] else 'FAIL'} criterion {key}: {e['text']}"
        if e["notes"]:
            line += f"  [{'; '.join(e['notes'])}]"
        terminalreporter.write_line(line)
