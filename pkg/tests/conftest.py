"""Shared fixtures: the miniature WordNet and the George example."""
from pathlib import Path

import pytest

from entailment.lexkb import LexKB, load_kb
from entailment.logicform import LogicalForm, parse_logic_forms

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def kb() -> LexKB:
    with open(FIXTURES / "mini_wordnet.kb", encoding="utf-8") as handle:
        return load_kb(handle)


@pytest.fixture(scope="session")
def empty_kb() -> LexKB:
    return LexKB([], [])


@pytest.fixture(scope="session")
def george_t() -> LogicalForm:
    return parse_logic_forms((FIXTURES / "t_george.lf").read_text(encoding="utf-8"))[0]


@pytest.fixture(scope="session")
def george_h() -> LogicalForm:
    return parse_logic_forms((FIXTURES / "h_george.lf").read_text(encoding="utf-8"))[0]
