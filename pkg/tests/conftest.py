import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"
POSITIVE = sorted((CORPUS / "positive").glob("*.cle"))
NEGATIVE = sorted((CORPUS / "negative").glob("*.cle"))
GOLDEN = Path(__file__).resolve().parent / "golden"

sys.path.insert(0, str(Path(__file__).resolve().parent))


def load(path):
    """(program, table, diagnostics) for a corpus file."""
    from callee.typecheck import check_source

    return check_source(Path(path).read_text(encoding="utf-8"))


def checked(text):
    """Parse and check source that must be well-typed; returns the elaborated (table, main)."""
    from callee.typecheck import check_source, elaborate

    program, table, diags = check_source(text)
    assert not diags, [d.render("<src>") for d in diags]
    return elaborate(table, program.main)


@pytest.fixture
def at_root(monkeypatch):
    monkeypatch.chdir(ROOT)
    return ROOT


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
