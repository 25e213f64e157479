import pytest

from corpus_helpers import toy_corpus


@pytest.fixture(scope="session")
def small_corpus():
    return toy_corpus(n_per_category=10, seed=11)
