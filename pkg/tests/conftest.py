from __future__ import annotations

import pytest

from recmaa.corpus import corpus_spec, load_vector_cases
from recmaa.engine import Engine


@pytest.fixture(scope="session")
def spec():
    return corpus_spec()


@pytest.fixture(scope="session")
def vector_cases(spec):
    return load_vector_cases(spec=spec)


@pytest.fixture()
def engine(spec):
    return Engine(spec)


@pytest.fixture()
def pure_engine(spec):
    return Engine(spec, backend="pure")
