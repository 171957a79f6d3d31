import scorecard


def pytest_terminal_summary(terminalreporter):
    if scorecard.LINES:
        terminalreporter.section("acceptance scorecard")
        for line in sorted(scorecard.LINES):
            terminalreporter.write_line(line)
