import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    n, title = m.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        msg = ""
        if rep.failed and call.excinfo is not None:
            msg = str(call.excinfo.value).splitlines()[0][:160]
        _RESULTS[n] = (title, "PASS" if rep.passed else "FAIL", msg)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        title, status, msg = _RESULTS[n]
        line = f"criterion {n:2d} {status}: {title}"
        if msg:
            line += f" -- {msg}"
        terminalreporter.write_line(line)
