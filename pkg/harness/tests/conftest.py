import pytest

from harness_corpus import build_corpus


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    return build_corpus(tmp_path_factory.mktemp("corpus"), n_per_class=20)
