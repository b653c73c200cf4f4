"""Pydantic request/response models for the HTTP API.

These mirror the on-disk JSON formats: ontology documents, service
descriptors, application profiles, churn traces and run reports.
"""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field


class TypeDoc(BaseModel):
    language: str = ""
    name: str = ""


class ConceptDoc(BaseModel):
    name: str
    ontology: str
    semantic: str


class ParamDoc(BaseModel):
    name: str
    type: TypeDoc = TypeDoc()
    ontology: str
    semantic: str


class OutputDoc(BaseModel):
    type: TypeDoc = TypeDoc()
    ontology: str
    semantic: str


class NfpDoc(BaseModel):
    kind: Literal["qualitative", "quantitative"]
    name: str
    ontology: Optional[str] = None
    semantic: Optional[str] = None
    value: Optional[float] = None
    operator: Optional[str] = None


class OperationDoc(BaseModel):
    concept: ConceptDoc
    inputs: list[ParamDoc] = Field(default_factory=list)
    output: Optional[OutputDoc] = None
    nfps: list[NfpDoc] = Field(default_factory=list)


class InterfaceDoc(BaseModel):
    operations: list[OperationDoc]


class ServiceDoc(BaseModel):
    id: str
    interface: InterfaceDoc
    metadata: dict[str, Any] = Field(default_factory=dict)


class OntologyDoc(BaseModel):
    id: str
    concepts: list[str]
    subsumption: list[tuple[str, str]] = Field(default_factory=list)
    equivalences: list[tuple[str, str]] = Field(default_factory=list)


class ReferenceDoc(BaseModel):
    nfps: list[NfpDoc] = Field(default_factory=list)


class ProfileDoc(BaseModel):
    app: str
    interface: InterfaceDoc
    operations: Optional[list[str]] = None
    reference: Optional[ReferenceDoc] = None
    weights: Optional[dict[str, float]] = None


class ConceptRefDoc(BaseModel):
    ontology: str
    name: str


class DistanceTableDoc(BaseModel):
    exact: float = 0.0
    plugin: float = 0.2
    subsume: float = 0.8
    fail: float = 1.0


# -- requests ---------------------------------------------------------------


class ConceptMatchRequest(BaseModel):
    ontologies: list[OntologyDoc]
    a: ConceptRefDoc
    b: ConceptRefDoc
    distances: Optional[DistanceTableDoc] = None


class ServicePairRequest(BaseModel):
    ontologies: list[OntologyDoc]
    service_a: ServiceDoc
    service_b: ServiceDoc
    operation_a: Optional[str] = None
    operation_b: Optional[str] = None
    subset: Optional[list[str]] = None
    weights: Optional[list[float]] = None
    op_weights: Optional[list[float]] = None
    distances: Optional[DistanceTableDoc] = None


class QosDegreeRequest(BaseModel):
    ontologies: list[OntologyDoc]
    reference: ServiceDoc
    candidate: ServiceDoc
    population: list[ServiceDoc] = Field(default_factory=list)
    weights: Optional[dict[str, float]] = None
    distances: Optional[DistanceTableDoc] = None


class PlanRequest(BaseModel):
    ontologies: list[OntologyDoc]
    environment: list[ServiceDoc]
    departed: str
    profile: Optional[ProfileDoc] = None


class TraceEventDoc(BaseModel):
    at: int
    kind: Literal["register", "unregister", "bind"]
    payload: Any


class SimulateRequest(BaseModel):
    ontologies: list[OntologyDoc]
    trace: list[TraceEventDoc]
    config: Optional[dict[str, Any]] = None


class BenchRequest(BaseModel):
    n: int = 100
    seed: int = 0
    sizes: Optional[list[int]] = None


class CallRequest(BaseModel):
    app: str
    payload: Any = None


# -- responses ----------------------------------------------------------------


class ConceptMatchResponse(BaseModel):
    value: str
    distance: float


class MatchResponse(BaseModel):
    value: str
    pairing: Optional[list[tuple[int, int]]] = None
    concept: Optional[str] = None
    output: Optional[str] = None
    inputs: list[str] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)
    equivalent: bool = False
    almost_equivalent: bool = False


class DistanceResponse(BaseModel):
    distance: float


class QosTableRow(BaseModel):
    property: str
    kind: str
    weight: float
    degree: float
    reference_value: Optional[float] = None
    candidate_value: Optional[float] = None
    reference_eta: Optional[float] = None
    candidate_eta: Optional[float] = None
    reference_z: Optional[float] = None
    candidate_z: Optional[float] = None
    mean: Optional[float] = None
    stddev: Optional[float] = None
    reference_concept: Optional[str] = None
    candidate_concept: Optional[str] = None


class QosDegreeResponse(BaseModel):
    degree: float
    table: list[QosTableRow] = Field(default_factory=list)


class PlanEntryDoc(BaseModel):
    service: str
    degree: float
    subset: Optional[list[str]] = None


class PlanResponse(BaseModel):
    service: str
    t_equiv: list[PlanEntryDoc]
    t_almost: list[PlanEntryDoc]
    t_subset: list[PlanEntryDoc]
    t_subsume: list[PlanEntryDoc]
    proxy_fallback: bool


class BindingDoc(BaseModel):
    app: str
    service: Optional[str]
    bound_at: int
    mode: str
    subset: Optional[list[str]] = None
    queued_calls: int = 0


class RebindDoc(BaseModel):
    app: str
    from_: Optional[str] = Field(default=None, alias="from")
    to: Optional[str] = None
    mode: str
    degree: Optional[float] = None
    flushed: int = 0
    expired: int = 0

    model_config = {"populate_by_name": True}


class RegisterResponse(BaseModel):
    service: str
    rebinds: list[RebindDoc] = Field(default_factory=list)


class UnregisterResponse(BaseModel):
    plan: PlanResponse
    rebinds: list[RebindDoc] = Field(default_factory=list)


class EventRecord(BaseModel):
    event: str
    service: Optional[str]
    app: Optional[str]
    chosen: Optional[str]
    tier: Optional[str]
    degree: Optional[float]
    latency_us: float


class ReportResponse(BaseModel):
    decisions: list[dict[str, Any]]
    timings: dict[str, Any]
    bindings: dict[str, Any]
    events: list[dict[str, Any]]


class BenchRow(BaseModel):
    n: int
    pairwise_match_ms: float
    plan_ms: float


class ValidationResponse(BaseModel):
    service: str
    diagnostics: list[dict[str, str]] = Field(default_factory=list)
