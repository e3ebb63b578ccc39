import pytest

from convsearch.index import Document, build_index
from convsearch.textproc import TextprocConfig


@pytest.fixture(scope="session")
def plain_config():
    """No stemming, no stopwords: terms are just lowercased words."""
    return TextprocConfig(stem=False, stopwords=frozenset(), abbreviations={})


@pytest.fixture()
def tiny_index(plain_config):
    """The two-document corpus used by the worked scoring examples."""
    docs = [Document("d1", "cat sat"), Document("d2", "dog sat sat")]
    return build_index(docs, plain_config)
