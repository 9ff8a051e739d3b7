import re

ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    num, name = int(m.group(1)), m.group(2).replace("_", " ")
    if report.when == "call" or report.outcome != "passed":
        elapsed = dict(report.user_properties).get("elapsed")
        ACCEPTANCE[num] = (name, report.outcome, elapsed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        name, outcome, elapsed = ACCEPTANCE[num]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        took = f" ({elapsed:.2f} s)" if elapsed is not None else ""
        terminalreporter.write_line(f"ACCEPTANCE {num:2d} {verdict}: {name}{took}")
