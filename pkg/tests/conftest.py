import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from winsumm.corpus import CorpusPair, make_document  # noqa: E402
from winsumm.harness.synthetic import overfit_corpus, sectioned_corpus, write_corpus  # noqa: E402


def pair_from_text(doc_id: str, paper: str, slides: str) -> CorpusPair:
    return CorpusPair(make_document(doc_id, paper), make_document(doc_id, slides))


@pytest.fixture
def make_pair():
    return pair_from_text


@pytest.fixture
def small_corpus(tmp_path) -> Path:
    """Twelve sectioned documents of 50 sentences on disk."""
    return write_corpus(sectioned_corpus(12, seed=5), tmp_path / "corpus")


@pytest.fixture
def tiny_corpus(tmp_path) -> Path:
    """Two short documents, used for bookkeeping checks."""
    return write_corpus(overfit_corpus(n_docs=2, n_sents=10, seed=1), tmp_path / "tiny")

# filled by the acceptance suite, echoed at the end of every run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
