"""Collects the acceptance outcomes and prints one line per criterion at the end."""

import pytest

_CRITERIA = {}


@pytest.fixture
def record(request):
    """record(text) attaches a one-line detail to the running criterion."""
    key = request.node.nodeid
    _CRITERIA.setdefault(key, {"detail": [], "outcome": None})

    def add(text):
        _CRITERIA[key]["detail"].append(str(text))
    return add


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _CRITERIA.setdefault(report.nodeid, {"detail": [], "outcome": None})
        _CRITERIA[report.nodeid]["outcome"] = report.outcome
    elif "test_acceptance.py" in report.nodeid and report.when == "setup" and report.outcome != "passed":
        _CRITERIA.setdefault(report.nodeid, {"detail": [], "outcome": None})["outcome"] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_CRITERIA, key=lambda s: s.split("::")[-1]):
        r = _CRITERIA[nodeid]
        if r["outcome"] is None:
            continue
        name = nodeid.split("::")[-1].replace("test_", "", 1)
        mark = "PASS" if r["outcome"] == "passed" else "FAIL" if r["outcome"] == "failed" else r["outcome"].upper()
        line = "%s  %s" % (mark, name)
        if r["detail"]:
            line += "  (" + "; ".join(r["detail"]) + ")"
        terminalreporter.write_line(line)
