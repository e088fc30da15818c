import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# criterion number -> list of (title, outcome, detail)
_CRITERIA: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        number, title = marker.args
        detail = "; ".join(str(v) for k, v in report.user_properties if k == "detail")
        _CRITERIA.setdefault(number, []).append((title, report.outcome, detail, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        runs = _CRITERIA[number]
        title = runs[0][0]
        ok = all(outcome == "passed" for _, outcome, _, _ in runs)
        details = "; ".join(d for _, _, d, _ in runs if d)
        seconds = sum(duration for *_, duration in runs)
        line = f"{'PASS' if ok else 'FAIL'}  [{number}] {title} ({seconds:.2f}s)"
        if details:
            line += f": {details}"
        terminalreporter.write_line(line)
