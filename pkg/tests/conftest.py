"""Shared pytest hooks.

The acceptance tests record one checklist line per criterion. Echo them
after the run so the gate stays readable without -s.
"""
from __future__ import annotations

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance gate")
    for line in lines:
        terminalreporter.write_line(line)
