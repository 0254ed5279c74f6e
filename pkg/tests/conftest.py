import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

TOY = Path(__file__).resolve().parent.parent / "src" / "wordconf" / "data" / "toy"


@pytest.fixture
def toy_dir():
    return TOY


@pytest.fixture
def write(tmp_path):
    """Write text to a file under tmp_path and return its path."""

    def _write(name, text, encoding="utf-8"):
        path = tmp_path / name
        if isinstance(text, bytes):
            path.write_bytes(text)
        else:
            path.write_text(text, encoding=encoding)
        return path

    return _write


ACCEPTANCE_RESULTS: dict = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if name.startswith("test_criterion_"):
        ACCEPTANCE_RESULTS[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda n: int(n.split("_")[2])):
        terminalreporter.write_line(f"{ACCEPTANCE_RESULTS[name]}  {name}")
