import os

import pytest

from kbread.kb import load_kb_dir

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def kb_dir():
    return os.path.join(FIXTURES, "kb")


@pytest.fixture(scope="session")
def kb(kb_dir):
    return load_kb_dir(kb_dir)
