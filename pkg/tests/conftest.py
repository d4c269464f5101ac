import sys
from collections import defaultdict
from pathlib import Path

# make the mpmath oracle module importable as ``oracles``
sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion this test belongs to")


def pytest_runtest_logreport(report):
    number = dict(report.user_properties).get("criterion")
    if number is None:
        return
    if report.when == "call" or report.outcome == "failed":
        _CRITERIA[number].append(report.outcome == "passed")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        verdict = "PASS" if all(_CRITERIA[number]) else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE criterion {number}: {verdict}")
