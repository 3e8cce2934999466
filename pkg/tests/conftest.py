import os

import pytest

from tagsearch.completion import build_index
from tagsearch.corpus import ingest_triples
from tagsearch.graph import load_edges

DATA = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="session")
def corpus():
    return ingest_triples(os.path.join(DATA, "fixture_triples.tsv"))


@pytest.fixture(scope="session")
def graph(corpus):
    return load_edges(os.path.join(DATA, "fixture_edges.tsv"), corpus)


@pytest.fixture(scope="session")
def index(corpus):
    return build_index(corpus)
