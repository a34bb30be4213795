import report


def pytest_terminal_summary(terminalreporter):
    if report.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in report.lines():
            terminalreporter.write_line(line)
