import pytest

_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    rep = outcome.get_result()
    key, title = marker.args
    _, ok = _criteria.get(key, (title, True))
    _criteria[key] = (title, ok and not rep.failed and not (rep.when == "call" and rep.skipped))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria):
        title, ok = _criteria[key]
        terminalreporter.write_line("criterion {:<3} {}  {}".format(key, "PASS" if ok else "FAIL", title))
