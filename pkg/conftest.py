"""Repo-wide pytest hooks.

The end-to-end tests record one human-readable PASS/FAIL line per
criterion in a module-level ``ACCEPTANCE_LINES`` list; echo those in the
terminal summary so they are visible without -s.
"""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for mod in list(sys.modules.values()):
        recorded = getattr(mod, "ACCEPTANCE_LINES", None)
        if isinstance(recorded, list):
            lines.extend(str(x) for x in recorded)
    if lines:
        terminalreporter.section("acceptance summary")
        for line in lines:
            terminalreporter.line(line)
