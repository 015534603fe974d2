import pathlib

import pytest

from ligforge import parse_grammar

ROOT = pathlib.Path(__file__).resolve().parent.parent
GRAMMAR_DIR = ROOT / "grammars"

COPY_PATH = GRAMMAR_DIR / "copy_language.lig"
PUMP_PATH = GRAMMAR_DIR / "cyclic_pump.lig"


@pytest.fixture(scope="session")
def copy_lig():
    """The w-c-w copy language: 8 productions r1..r8 over S, T."""
    return parse_grammar(COPY_PATH.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def pump_lig():
    """Single word "a", infinitely ambiguous through a push/pop cycle."""
    return parse_grammar(PUMP_PATH.read_text(encoding="utf-8"))
