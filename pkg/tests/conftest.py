import pytest

from hybcore.harness.corpus import load_corpus
from hybcore.opsem import clear_caches
from hybcore.params import EvalParams

FAST = EvalParams(max_unfold=64)


@pytest.fixture(scope="session")
def corpus():
    return {entry.id: entry for entry in load_corpus()}


@pytest.fixture
def fresh_caches():
    clear_caches()
    yield
