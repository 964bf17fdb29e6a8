import pathlib

import pytest

import skg

ROOT = pathlib.Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def grammar():
    return skg.load_grammar((ROOT / "grammars" / "paper.skg").read_text())


@pytest.fixture(scope="session")
def np_goal():
    return skg.parse_value((ROOT / "grammars" / "np.sem").read_text())


@pytest.fixture(scope="session")
def sentence_goal():
    return skg.parse_value((ROOT / "grammars" / "sentence.sem").read_text())
