from pathlib import Path

import pytest

from attackdag import AttributeTable, BranchSample, branch_features, load_corpus
from attackdag.storage import load_labels

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "data"


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(DATA / "corpus.json")


@pytest.fixture(scope="session")
def dag(corpus):
    return corpus.attack_dag()


@pytest.fixture(scope="session")
def table():
    return AttributeTable.from_csv((DATA / "attributes.csv").read_text())


@pytest.fixture(scope="session")
def labeled(table):
    rows = load_labels(DATA / "labels.csv")
    return [
        BranchSample(origin=o, dest=d, features=branch_features(o, d, table), label=l)
        for o, d, l in rows
    ]


@pytest.fixture(scope="session")
def data_dir():
    return DATA
