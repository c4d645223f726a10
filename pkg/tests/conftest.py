import sys
from pathlib import Path

# Make the runnable scripts importable (the coverage study doubles as the
# CI-coverage acceptance check).
sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "scripts"))

# Verdict lines recorded by the acceptance tests; replayed after the run so
# they survive output capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
