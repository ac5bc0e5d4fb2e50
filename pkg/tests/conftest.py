from pathlib import Path

import pytest

from kbdebug.diagnosis import DiagnosisEngine, Dpi, diagnosis_priors
from kbdebug.formulas import FaultModel, parse_kb
from kbdebug.queries import QueryGenerator
from kbdebug.reasoner import Literal

FIXTURES = Path(__file__).parent / "fixtures"


def lit(name: str) -> Literal:
    return Literal(name, True)


def lits(*names: str) -> frozenset[Literal]:
    return frozenset(lit(n) for n in names)


def D(*indices: int) -> frozenset[frozenset[str]]:
    """Partition cell made of the singleton diagnoses {ax_i}."""
    return frozenset(frozenset({f"ax{i}"}) for i in indices)


@pytest.fixture(scope="session")
def university_kb():
    return parse_kb((FIXTURES / "university.kb").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def university_dpi(university_kb):
    return Dpi(university_kb)


@pytest.fixture()
def engine(university_dpi):
    return DiagnosisEngine(university_dpi)


@pytest.fixture()
def leading(engine):
    return engine.leading_diagnoses(FaultModel(), 9)


@pytest.fixture()
def priors(engine, leading):
    return diagnosis_priors(leading, engine, FaultModel())


@pytest.fixture()
def generator(engine):
    return QueryGenerator(engine)
