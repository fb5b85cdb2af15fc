from pathlib import Path

import pytest

from noether.library import heisenberg, modular
from noether.presfile import load_presentation

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


def corpus_files(p=None):
    files = sorted((DATA / "corpus").glob("*.pres"))
    if p is not None:
        files = [f for f in files if load_presentation(f).group.p == p]
    return files


@pytest.fixture
def heis():
    return heisenberg(3)


@pytest.fixture
def mod27():
    return modular(3)


@pytest.fixture(scope="session")
def cond2_violator():
    return load_presentation(DATA / "cond2-violator-p3.pres")


_CRITERIA: dict = {}


def record_criterion(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    _CRITERIA[n] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[n])
