"""Shared test plumbing.

The acceptance tests record one verdict line per criterion; stdout is
captured by pytest, so the lines are replayed in the terminal summary
where they are always visible.
"""

acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
