import re

import pytest

ACCEPTANCE_LINES = {}


def _line(number, ok, detail):
    return f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.fixture
def record_criterion():
    def record(number, ok, detail):
        ACCEPTANCE_LINES[number] = _line(number, ok, detail)
        print(ACCEPTANCE_LINES[number])
    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = re.match(r"test_criterion_(\d+)", item.name)
    if m and rep.when == "call" and rep.failed:
        number = int(m.group(1))
        if number not in ACCEPTANCE_LINES or "PASS" in ACCEPTANCE_LINES[number]:
            msg = str(call.excinfo.value).splitlines()[0] if call.excinfo else "failed"
            ACCEPTANCE_LINES[number] = _line(number, False, msg[:120] or call.excinfo.typename)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
