import re

_CRITERIA = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m or report.when not in ("setup", "call"):
        return
    n = int(m.group(1))
    if report.when == "setup" and report.passed:
        return
    detail = dict(report.user_properties).get("detail", "")
    if report.failed and not detail:
        detail = report.longrepr.reprcrash.message if hasattr(report.longrepr, "reprcrash") else "error"
    _CRITERIA[n] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status, detail = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {detail}")
