import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
