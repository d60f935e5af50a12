import pytest

_outcomes: dict[str, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes.setdefault(str(marker.args[0]), []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_outcomes, key=lambda s: (int("".join(c for c in s if c.isdigit())), s)):
        ok = all(o == "passed" for o in _outcomes[label])
        terminalreporter.write_line(f"criterion {label:>3}: {'PASS' if ok else 'FAIL'}")
