"""Service data model and descriptor parsing.

A service publishes one functional interface: an ordered list of operations,
each with a named concept, semantically annotated inputs, an optional output
and a set of non-functional properties (quantitative value + order operator,
or qualitative concept). Syntactic `type` fields are carried verbatim but are
never compared; matching is purely semantic.

All values are immutable after construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Union

from .ontology import ConceptRef, OntologyContext, UnknownConceptError, as_store

OPERATORS = ("<", ">", "<=", ">=")

_OPERATOR_ALIASES = {"≤": "<=", "≥": ">=", "=<": "<=", "=>": ">="}


class DescriptorError(ValueError):
    """Malformed or invariant-breaking service descriptor."""


@dataclass(frozen=True)
class TypeRef:
    language: str
    name: str


@dataclass(frozen=True)
class Parameter:
    name: str
    type: TypeRef
    semantic: ConceptRef


@dataclass(frozen=True)
class OutputSpec:
    type: TypeRef
    semantic: ConceptRef


@dataclass(frozen=True)
class NamedConcept:
    name: str
    semantic: ConceptRef


@dataclass(frozen=True)
class QualitativeNfp:
    name: str
    semantic: ConceptRef

    kind = "qualitative"


@dataclass(frozen=True)
class QuantitativeNfp:
    name: str
    value: float
    operator: str

    kind = "quantitative"

    def __post_init__(self) -> None:
        if self.operator not in OPERATORS:
            raise DescriptorError(f"nfp {self.name!r}: operator must be one of {OPERATORS}, got {self.operator!r}")
        if not math.isfinite(self.value):
            raise DescriptorError(f"nfp {self.name!r}: value must be finite, got {self.value!r}")


Nfp = Union[QualitativeNfp, QuantitativeNfp]


@dataclass(frozen=True)
class Operation:
    concept: NamedConcept
    inputs: tuple[Parameter, ...] = ()
    output: Optional[OutputSpec] = None
    nfps: tuple[Nfp, ...] = ()

    def __post_init__(self) -> None:
        names = [p.name for p in self.inputs]
        if len(set(names)) != len(names):
            raise DescriptorError(f"operation {self.name!r}: duplicate input names {sorted(names)}")
        nfp_names = [n.name for n in self.nfps]
        if len(set(nfp_names)) != len(nfp_names):
            raise DescriptorError(f"operation {self.name!r}: duplicate nfp names {sorted(nfp_names)}")

    @property
    def name(self) -> str:
        return self.concept.name

    def nfp(self, name: str) -> Optional[Nfp]:
        for np in self.nfps:
            if np.name == name:
                return np
        return None


@dataclass(frozen=True)
class Interface:
    operations: tuple[Operation, ...]

    def __post_init__(self) -> None:
        names = [op.name for op in self.operations]
        if len(set(names)) != len(names):
            raise DescriptorError(f"interface: duplicate operation names {sorted(names)}")

    def __len__(self) -> int:
        return len(self.operations)

    def operation(self, name: str) -> Operation:
        for op in self.operations:
            if op.name == name:
                return op
        raise KeyError(name)


@dataclass(frozen=True)
class Service:
    id: str
    interface: Interface
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.id:
            raise DescriptorError("service id must be non-empty")
        if not self.interface.operations:
            raise DescriptorError(f"service {self.id!r}: interface must declare at least one operation")


@dataclass(frozen=True)
class Diagnostic:
    """One unresolved or inconsistent reference, with the offending field path."""

    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


# -- parsing --------------------------------------------------------------


def _ref(doc: Mapping, path: str) -> ConceptRef:
    for key in ("ontology", "semantic"):
        if key not in doc:
            raise DescriptorError(f"{path}: missing field {key!r}")
    return ConceptRef(ontology=str(doc["ontology"]), name=str(doc["semantic"]))


def _type(doc: Mapping, path: str) -> TypeRef:
    if not isinstance(doc, Mapping):
        raise DescriptorError(f"{path}.type: expected an object with 'language' and 'name'")
    return TypeRef(language=str(doc.get("language", "")), name=str(doc.get("name", "")))


def _nfp(doc: Mapping, path: str) -> Nfp:
    kind = doc.get("kind")
    name = doc.get("name")
    if not name:
        raise DescriptorError(f"{path}: nfp missing 'name'")
    if kind == "qualitative":
        return QualitativeNfp(name=str(name), semantic=_ref(doc, path))
    if kind == "quantitative":
        if "value" not in doc or "operator" not in doc:
            raise DescriptorError(f"{path}: quantitative nfp needs 'value' and 'operator'")
        try:
            value = float(doc["value"])
        except (TypeError, ValueError):
            raise DescriptorError(f"{path}: nfp value {doc['value']!r} is not a number") from None
        operator = _OPERATOR_ALIASES.get(str(doc["operator"]), str(doc["operator"]))
        return QuantitativeNfp(name=str(name), value=value, operator=operator)
    raise DescriptorError(f"{path}: nfp kind must be 'qualitative' or 'quantitative', got {kind!r}")


def parse_nfp(doc: Mapping, path: str = "nfp") -> Nfp:
    return _nfp(doc, path)


def _operation(doc: Mapping, path: str) -> Operation:
    if "concept" not in doc:
        raise DescriptorError(f"{path}: operation missing 'concept'")
    cpt = doc["concept"]
    if "name" not in cpt:
        raise DescriptorError(f"{path}.concept: missing field 'name'")
    concept = NamedConcept(name=str(cpt["name"]), semantic=_ref(cpt, f"{path}.concept"))
    inputs = tuple(
        Parameter(
            name=str(p.get("name", "")),
            type=_type(p.get("type", {}), f"{path}.inputs[{i}]"),
            semantic=_ref(p, f"{path}.inputs[{i}]"),
        )
        for i, p in enumerate(doc.get("inputs", []))
    )
    for i, p in enumerate(inputs):
        if not p.name:
            raise DescriptorError(f"{path}.inputs[{i}]: input missing 'name'")
    output = None
    if doc.get("output") is not None:
        out = doc["output"]
        output = OutputSpec(type=_type(out.get("type", {}), f"{path}.output"), semantic=_ref(out, f"{path}.output"))
    nfps = tuple(_nfp(n, f"{path}.nfps[{i}]") for i, n in enumerate(doc.get("nfps", [])))
    return Operation(concept=concept, inputs=inputs, output=output, nfps=nfps)


def parse_interface(doc: Mapping, path: str = "interface") -> Interface:
    ops = doc.get("operations")
    if not isinstance(ops, list):
        raise DescriptorError(f"{path}: missing 'operations' list")
    return Interface(operations=tuple(_operation(op, f"{path}.operations[{i}]") for i, op in enumerate(ops)))


def parse_service(source: Union[str, Path, Mapping]) -> Service:
    """Parse a service descriptor document (dict, JSON string, or file path).

    Structural invariants (unique names, finite values, non-empty interface)
    are checked here; resolution of concept references against loaded
    ontologies is deferred to `validate_service`.
    """
    doc = _read(source)
    if "id" not in doc or "interface" not in doc:
        raise DescriptorError("service descriptor must define 'id' and 'interface'")
    return Service(
        id=str(doc["id"]),
        interface=parse_interface(doc["interface"]),
        metadata=dict(doc.get("metadata", {})),
    )


def _read(source: Union[str, Path, Mapping]) -> Mapping:
    if isinstance(source, Mapping):
        return source
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DescriptorError(f"malformed service descriptor: {exc}") from exc
    if not isinstance(doc, dict):
        raise DescriptorError("service descriptor must be a JSON object")
    return doc


# -- serialization ---------------------------------------------------------


def _ref_fields(ref: ConceptRef) -> dict:
    return {"ontology": ref.ontology, "semantic": ref.name}


def operation_to_dict(op: Operation) -> dict:
    doc: dict = {
        "concept": {"name": op.concept.name, **_ref_fields(op.concept.semantic)},
        "inputs": [
            {"name": p.name, "type": {"language": p.type.language, "name": p.type.name}, **_ref_fields(p.semantic)}
            for p in op.inputs
        ],
        "nfps": [
            {"kind": "qualitative", "name": n.name, **_ref_fields(n.semantic)}
            if isinstance(n, QualitativeNfp)
            else {"kind": "quantitative", "name": n.name, "value": n.value, "operator": n.operator}
            for n in op.nfps
        ],
    }
    if op.output is not None:
        doc["output"] = {
            "type": {"language": op.output.type.language, "name": op.output.type.name},
            **_ref_fields(op.output.semantic),
        }
    return doc


def service_to_dict(service: Service) -> dict:
    return {
        "id": service.id,
        "interface": {"operations": [operation_to_dict(op) for op in service.interface.operations]},
        "metadata": dict(service.metadata),
    }


# -- semantic validation -----------------------------------------------------


def _check(ref: ConceptRef, path: str, context: OntologyContext, out: list[Diagnostic]) -> None:
    try:
        as_store(context).resolve(ref)
    except UnknownConceptError as exc:
        out.append(Diagnostic(path=path, message=str(exc)))


def validate_service(service: Service, context: OntologyContext) -> list[Diagnostic]:
    """Resolve every concept reference; one diagnostic per unresolved ref."""
    diagnostics: list[Diagnostic] = []
    for i, op in enumerate(service.interface.operations):
        base = f"interface.operations[{i}]"
        _check(op.concept.semantic, f"{base}.concept.semantic", context, diagnostics)
        for j, p in enumerate(op.inputs):
            _check(p.semantic, f"{base}.inputs[{j}].semantic", context, diagnostics)
        if op.output is not None:
            _check(op.output.semantic, f"{base}.output.semantic", context, diagnostics)
        for j, n in enumerate(op.nfps):
            if isinstance(n, QualitativeNfp):
                _check(n.semantic, f"{base}.nfps[{j}].semantic", context, diagnostics)
    return diagnostics
