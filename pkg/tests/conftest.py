import re

import pytest

VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(VERDICTS, [])

    def check(number, title, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>3}: {title} | {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=_order):
            terminalreporter.write_line(line)


def _order(line):
    number, suffix = re.search(r"criterion\s+(\d+)(\w*):", line).groups()
    return int(number), suffix
