import os

import pytest

from glterm.evaluator import ensure_recursion_limit
from glterm.prover import load_text, prelude_db

CORPUS = os.path.join(os.path.dirname(__file__), "corpus")

ensure_recursion_limit()


def theory_db(text: str):
    db = prelude_db()
    load_text(text, db, path=os.path.join(CORPUS, "inline.gl"))
    return db


@pytest.fixture(scope="session")
def prelude():
    return prelude_db()


@pytest.fixture(scope="session")
def defs(prelude):
    return prelude.defs


@pytest.fixture(scope="session")
def records_db():
    return theory_db('(include-book "records")')


@pytest.fixture(scope="session")
def bitops_db():
    return theory_db('(include-book "bitops") (include-book "bitops-ctrex")')


@pytest.fixture(scope="session")
def both_db():
    return theory_db('(include-book "records") (include-book "bitops") (include-book "bitops-ctrex")')
