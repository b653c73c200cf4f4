"""FastAPI service exposing matching, QoS scoring, planning and a live registry.

Stateless endpoints under /compute take every document inline, so one-shot
clients (including the CLI) need no server-side setup. The /registry
endpoints hold per-app state: ontologies are loaded once, services register
and unregister against them, and applications bind through profiles.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..matching import (
    MatchingError,
    interface_distance,
    match_interfaces,
    match_interfaces_over,
    match_operations,
    operation_distance,
)
from ..model import (
    DescriptorError,
    Operation,
    QualitativeNfp,
    QuantitativeNfp,
    Service,
    parse_service,
    validate_service,
)
from ..ontology import (
    ConceptRef,
    DEFAULT_DISTANCES,
    DistanceTable,
    OntologyError,
    OntologyStore,
    UnknownConceptError,
    load_ontology,
)
from ..qos import Population, QosError, build_populations, eta, qos_degree, z_score
from ..registry import (
    ApplicationProfile,
    DuplicateServiceError,
    Registry,
    RegistryError,
    UnknownServiceError,
)
from ..sim import SimConfig, TraceError, bench, load_trace, run_scenario
from . import schemas as sc

_UNPROCESSABLE = (DescriptorError, OntologyError, QosError, MatchingError, TraceError, RegistryError, ValueError)


def create_app() -> FastAPI:
    app = FastAPI(title="semsub", version=__version__)
    app.state.store = OntologyStore()
    app.state.registry = Registry(app.state.store)

    @app.exception_handler(UnknownServiceError)
    @app.exception_handler(UnknownConceptError)
    async def _not_found(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(DuplicateServiceError)
    async def _conflict(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    for exc_type in _UNPROCESSABLE:
        @app.exception_handler(exc_type)
        async def _unprocessable(request: Request, exc: Exception) -> JSONResponse:
            return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/")
    def health() -> dict:
        return {"name": "semsub", "version": __version__}

    # -- stateless compute ---------------------------------------------------

    @app.post("/compute/match-concepts", response_model=sc.ConceptMatchResponse)
    def compute_match_concepts(req: sc.ConceptMatchRequest) -> sc.ConceptMatchResponse:
        store = _store(req.ontologies)
        table = _table(req.distances)
        a = ConceptRef(req.a.ontology, req.a.name)
        b = ConceptRef(req.b.ontology, req.b.name)
        value = store.match(a, b)
        return sc.ConceptMatchResponse(value=value.label, distance=table.of(value))

    @app.post("/compute/match-operations", response_model=sc.MatchResponse)
    def compute_match_operations(req: sc.ServicePairRequest) -> sc.MatchResponse:
        store, svc_a, svc_b = _pair(req)
        op_a = _pick_operation(svc_a, req.operation_a)
        op_b = _pick_operation(svc_b, req.operation_b)
        result = match_operations(store, op_a, op_b, _table(req.distances))
        return sc.MatchResponse(
            value=result.value.label,
            pairing=list(result.pairing) if result.pairing is not None else None,
            concept=result.concept.label if result.concept is not None else None,
            output=result.output.label if result.output is not None else None,
            inputs=[v.label for v in result.inputs],
            warnings=list(result.warnings),
            equivalent=result.value.label == "Exact",
            almost_equivalent=result.value.label == "PlugIn",
        )

    @app.post("/compute/match-interfaces", response_model=sc.MatchResponse)
    def compute_match_interfaces(req: sc.ServicePairRequest) -> sc.MatchResponse:
        store, svc_a, svc_b = _pair(req)
        table = _table(req.distances)
        if req.subset is not None:
            result = match_interfaces_over(store, svc_a.interface, svc_b.interface, req.subset, table)
        else:
            result = match_interfaces(store, svc_a.interface, svc_b.interface, table)
        return sc.MatchResponse(
            value=result.value.label,
            pairing=list(result.pairing) if result.pairing is not None else None,
            warnings=list(result.warnings),
            equivalent=result.value.label == "Exact",
            almost_equivalent=result.value.label == "PlugIn",
        )

    @app.post("/compute/operation-distance", response_model=sc.DistanceResponse)
    def compute_operation_distance(req: sc.ServicePairRequest) -> sc.DistanceResponse:
        store, svc_a, svc_b = _pair(req)
        op_a = _pick_operation(svc_a, req.operation_a)
        op_b = _pick_operation(svc_b, req.operation_b)
        distance = operation_distance(store, op_a, op_b, weights=req.weights, table=_table(req.distances))
        return sc.DistanceResponse(distance=distance)

    @app.post("/compute/interface-distance", response_model=sc.DistanceResponse)
    def compute_interface_distance(req: sc.ServicePairRequest) -> sc.DistanceResponse:
        store, svc_a, svc_b = _pair(req)
        distance = interface_distance(
            store, svc_a.interface, svc_b.interface, op_weights=req.op_weights, table=_table(req.distances))
        return sc.DistanceResponse(distance=distance)

    @app.post("/compute/qos-degree", response_model=sc.QosDegreeResponse)
    def compute_qos_degree(req: sc.QosDegreeRequest) -> sc.QosDegreeResponse:
        store = _store(req.ontologies)
        table = _table(req.distances)
        reference = parse_service(req.reference.model_dump())
        candidate = parse_service(req.candidate.model_dump())
        pool: dict[str, Service] = {}
        for doc in req.population:
            svc = parse_service(doc.model_dump())
            pool.setdefault(svc.id, svc)
        pool.setdefault(reference.id, reference)
        pool.setdefault(candidate.id, candidate)
        populations = build_populations((sid, op) for sid, svc in pool.items() for op in svc.interface.operations)

        ref_op = reference.interface.operations[0]
        cand_op = candidate.interface.operations[0]
        degree = qos_degree(store, ref_op, cand_op, weights=req.weights, populations=populations, table=table)
        rows = _qos_table(store, ref_op, cand_op, req.weights, populations, table)
        return sc.QosDegreeResponse(degree=degree, table=rows)

    @app.post("/compute/plan", response_model=sc.PlanResponse)
    def compute_plan(req: sc.PlanRequest) -> sc.PlanResponse:
        store = _store(req.ontologies)
        registry = Registry(store)
        departed_doc = None
        for doc in req.environment:
            if doc.id == req.departed:
                departed_doc = doc
            registry.register(parse_service(doc.model_dump()))
        if departed_doc is None:
            raise UnknownServiceError(f"departed service {req.departed!r} is not in the environment")
        profile = ApplicationProfile.parse(req.profile.model_dump(by_alias=True)) if req.profile else None
        plan = registry.plan_for(req.departed, profile)
        return sc.PlanResponse(**plan.to_dict())

    @app.post("/simulate", response_model=sc.ReportResponse)
    def simulate(req: sc.SimulateRequest) -> sc.ReportResponse:
        store = _store(req.ontologies)
        trace = load_trace([e.model_dump() for e in req.trace])
        report = run_scenario(trace, store, SimConfig.parse(req.config))
        return sc.ReportResponse(**report.to_dict())

    @app.post("/bench", response_model=list[sc.BenchRow])
    def run_bench(req: sc.BenchRequest) -> list[sc.BenchRow]:
        rows = bench(req.n, seed=req.seed, sizes=req.sizes)
        return [sc.BenchRow(**row) for row in rows]

    @app.post("/compute/validate", response_model=sc.ValidationResponse)
    def compute_validate(req: sc.ServicePairRequest) -> sc.ValidationResponse:
        store = _store(req.ontologies)
        svc = parse_service(req.service_a.model_dump())
        diagnostics = validate_service(svc, store)
        return sc.ValidationResponse(
            service=svc.id, diagnostics=[{"path": d.path, "message": d.message} for d in diagnostics])

    # -- stateful registry ------------------------------------------------------

    @app.post("/registry/ontologies", status_code=201)
    def registry_add_ontology(doc: sc.OntologyDoc) -> dict:
        ontology = load_ontology(doc.model_dump())
        app.state.store.add(ontology)
        return {"id": ontology.id, "concepts": len(ontology)}

    @app.get("/registry/ontologies")
    def registry_ontologies() -> list[str]:
        return [o.id for o in app.state.store]

    @app.post("/registry/services", response_model=sc.RegisterResponse, status_code=201)
    def registry_register(doc: sc.ServiceDoc) -> sc.RegisterResponse:
        service = parse_service(doc.model_dump())
        rebinds = app.state.registry.register(service)
        return sc.RegisterResponse(service=service.id, rebinds=[sc.RebindDoc(**d.to_dict()) for d in rebinds])

    @app.delete("/registry/services/{service_id}", response_model=sc.UnregisterResponse)
    def registry_unregister(service_id: str) -> sc.UnregisterResponse:
        plan, rebinds = app.state.registry.unregister(service_id)
        return sc.UnregisterResponse(
            plan=sc.PlanResponse(**plan.to_dict()),
            rebinds=[sc.RebindDoc(**d.to_dict()) for d in rebinds],
        )

    @app.get("/registry/services")
    def registry_services() -> list[str]:
        return list(app.state.registry.services)

    @app.post("/registry/bindings", response_model=sc.BindingDoc, status_code=201)
    def registry_bind(doc: sc.ProfileDoc) -> sc.BindingDoc:
        profile = ApplicationProfile.parse(doc.model_dump())
        binding = app.state.registry.bind(profile)
        return sc.BindingDoc(**binding.to_dict())

    @app.get("/registry/bindings", response_model=list[sc.BindingDoc])
    def registry_bindings() -> list[sc.BindingDoc]:
        return [sc.BindingDoc(**b.to_dict()) for b in app.state.registry.bindings.values()]

    @app.get("/registry/plan/{service_id}", response_model=sc.PlanResponse)
    def registry_plan(service_id: str, app_id: Optional[str] = None) -> sc.PlanResponse:
        profile = None
        if app_id is not None:
            profile = app.state.registry.profiles.get(app_id)
            if profile is None:
                raise UnknownServiceError(f"app {app_id!r} has no profile")
        plan = app.state.registry.plan_for(service_id, profile)
        return sc.PlanResponse(**plan.to_dict())

    @app.get("/registry/events", response_model=list[sc.EventRecord])
    def registry_events() -> list[sc.EventRecord]:
        return [sc.EventRecord(**rec) for rec in app.state.registry.events]

    @app.post("/registry/calls")
    def registry_call(req: sc.CallRequest) -> dict:
        return app.state.registry.enqueue_call(req.app, req.payload)

    return app


# -- helpers --------------------------------------------------------------------


def _store(docs: list[sc.OntologyDoc]) -> OntologyStore:
    return OntologyStore([load_ontology(d.model_dump()) for d in docs])


def _table(doc: Optional[sc.DistanceTableDoc]) -> DistanceTable:
    if doc is None:
        return DEFAULT_DISTANCES
    return DistanceTable(**doc.model_dump())


def _pair(req: sc.ServicePairRequest) -> tuple[OntologyStore, Service, Service]:
    store = _store(req.ontologies)
    return store, parse_service(req.service_a.model_dump()), parse_service(req.service_b.model_dump())


def _pick_operation(service: Service, name: Optional[str]) -> Operation:
    if name is None:
        return service.interface.operations[0]
    return service.interface.operation(name)


def _qos_table(
    store: OntologyStore,
    reference: Operation,
    candidate: Operation,
    weights: Optional[dict[str, float]],
    populations: dict[str, Population],
    table: DistanceTable,
) -> list[sc.QosTableRow]:
    names = [np.name for np in reference.nfps]
    ws = {n: (weights[n] if weights else 1.0 / len(names)) for n in names} if names else {}
    rows: list[sc.QosTableRow] = []
    for np_ref in reference.nfps:
        np_cand = candidate.nfp(np_ref.name)
        weight = ws[np_ref.name]
        if isinstance(np_ref, QuantitativeNfp) and isinstance(np_cand, QuantitativeNfp):
            pop = populations[np_ref.name]
            rows.append(sc.QosTableRow(
                property=np_ref.name, kind="quantitative", weight=weight,
                degree=abs(eta(pop, np_ref.value) - eta(pop, np_cand.value)),
                reference_value=np_ref.value, candidate_value=np_cand.value,
                reference_z=z_score(pop, np_ref.value), candidate_z=z_score(pop, np_cand.value),
                reference_eta=eta(pop, np_ref.value), candidate_eta=eta(pop, np_cand.value),
                mean=pop.mean, stddev=pop.stddev,
            ))
        elif isinstance(np_ref, QualitativeNfp) and isinstance(np_cand, QualitativeNfp):
            rows.append(sc.QosTableRow(
                property=np_ref.name, kind="qualitative", weight=weight,
                degree=store.distance(np_cand.semantic, np_ref.semantic, table),
                reference_concept=str(np_ref.semantic), candidate_concept=str(np_cand.semantic),
            ))
        else:
            rows.append(sc.QosTableRow(property=np_ref.name, kind="missing", weight=weight, degree=1.0))
    return rows


app = create_app()
