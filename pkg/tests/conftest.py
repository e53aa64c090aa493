"""Shared pytest hooks.

test_acceptance records one line per release criterion into
ACCEPTANCE_LINES; the hook below replays them in their own section after
the run so the whole pass/fail ledger is visible in one place even when
individual criterion output is captured.
"""

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
