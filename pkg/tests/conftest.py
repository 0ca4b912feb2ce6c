import pytest

from ramo.catalog import load_catalog
from ramo.embedding import DeterministicEmbedder
from ramo.vecindex import build_index

from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURE_CSV = REPO_ROOT / "fixtures" / "mini_catalog.csv"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

_acceptance_results: list[tuple[str, str]] = []


@pytest.fixture(scope="session")
def fixture_catalog():
    return load_catalog(FIXTURE_CSV)


@pytest.fixture(scope="session")
def embedder():
    return DeterministicEmbedder(dim=256)


@pytest.fixture(scope="session")
def fixture_index(fixture_catalog, embedder):
    return build_index(fixture_catalog, embedder)


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        name = report.nodeid.split("::")[-1]
        _acceptance_results.append((name, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance_results:
        terminalreporter.write_line(f"{outcome}  {name}")
