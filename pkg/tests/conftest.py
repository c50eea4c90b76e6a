import pytest

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(n, title): acceptance criterion number and title"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and report.when == "call":
        n, title = marker.args
        _CRITERIA[n] = (title, report.passed)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for n in sorted(_CRITERIA):
        title, passed = _CRITERIA[n]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"  criterion {n} ({title}): {status}")
