import json
from pathlib import Path

import pytest

from semsub import (
    ApplicationProfile,
    OntologyStore,
    load_ontology,
    parse_service,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture_json(relative: str):
    return json.loads((FIXTURES / relative).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def document_ont():
    return load_ontology(FIXTURES / "ontologies/document-ont.json")


@pytest.fixture(scope="session")
def printer_ont():
    return load_ontology(FIXTURES / "ontologies/printer-ont.json")


@pytest.fixture(scope="session")
def office_ont():
    return load_ontology(FIXTURES / "ontologies/office-ont.json")


@pytest.fixture(scope="session")
def store(document_ont, printer_ont, office_ont):
    return OntologyStore([document_ont, printer_ont, office_ont])


@pytest.fixture(scope="session")
def printing():
    return parse_service(FIXTURES / "services/printing.json")


@pytest.fixture(scope="session")
def impression():
    return parse_service(FIXTURES / "services/impression.json")


@pytest.fixture(scope="session")
def printer():
    return parse_service(FIXTURES / "services/printer.json")


@pytest.fixture(scope="session")
def printer_ops(printing, impression, printer):
    return {s.id: s.interface.operations[0] for s in (printing, impression, printer)}


@pytest.fixture(scope="session")
def ifc1():
    return parse_service(FIXTURES / "services/ifc1.json").interface


@pytest.fixture(scope="session")
def ifc2():
    return parse_service(FIXTURES / "services/ifc2.json").interface


@pytest.fixture(scope="session")
def ifc3():
    return parse_service(FIXTURES / "services/ifc3.json").interface


@pytest.fixture(scope="session")
def editor_profile():
    return ApplicationProfile.parse(load_fixture_json("profiles/editor-app.json"))


@pytest.fixture(scope="session")
def uniform_profile():
    return ApplicationProfile.parse(load_fixture_json("profiles/editor-app-uniform.json"))
