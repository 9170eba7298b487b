import pytest

_OUTCOMES: dict[int, bool] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.originalname != "test_criterion" or item.module.__name__.split(".")[-1] != "test_acceptance":
        return
    crit = item.callspec.params["criterion"]
    if report.when == "call" or (report.when == "setup" and report.failed):
        _OUTCOMES[crit] = report.passed and _OUTCOMES.get(crit, True)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_OUTCOMES):
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if _OUTCOMES[crit] else 'FAIL'}")
