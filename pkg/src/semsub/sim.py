"""Trace-driven churn simulation, synthetic service populations and benchmarks.

A trace is an ordered list of register / unregister / bind events with
logical timestamps. Replay drives a fresh registry strictly serially and
records, per event, the decision outcome and the wall-clock latency split
into a matching phase and a planning phase. Logical time makes replay
decisions a pure function of (trace, ontologies, config); wall-clock shows
up only in the timing report.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

from .model import (
    DescriptorError,
    Interface,
    NamedConcept,
    Operation,
    OutputSpec,
    Parameter,
    QualitativeNfp,
    QuantitativeNfp,
    Service,
    TypeRef,
    parse_service,
    service_to_dict,
)
from .matching import match_interfaces
from .ontology import ConceptRef, DEFAULT_DISTANCES, DistanceTable, Ontology, OntologyContext, as_store
from .registry import ApplicationProfile, Registry, RegistryError
from .qos import QosError


class TraceError(ValueError):
    """Malformed churn trace."""


@dataclass(frozen=True)
class ChurnEvent:
    at: int
    kind: str
    payload: Union[Mapping, str]

    KINDS = ("register", "unregister", "bind")


@dataclass
class SimConfig:
    proxy_capacity: int = 1024
    proxy_ttl: Optional[int] = None
    table: DistanceTable = DEFAULT_DISTANCES

    @classmethod
    def parse(cls, doc: Optional[Mapping]) -> "SimConfig":
        if not doc:
            return cls()
        table = DEFAULT_DISTANCES
        if "distances" in doc:
            table = DistanceTable(**doc["distances"])
        return cls(
            proxy_capacity=int(doc.get("proxy_capacity", 1024)),
            proxy_ttl=doc.get("proxy_ttl"),
            table=table,
        )


@dataclass
class RunReport:
    decisions: list[dict] = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    bindings: dict = field(default_factory=dict)
    events: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "decisions": self.decisions,
            "timings": self.timings,
            "bindings": self.bindings,
            "events": self.events,
        }


def load_trace(source: Union[str, Path, Sequence]) -> list[ChurnEvent]:
    """Load and validate a churn trace (JSON array of event records)."""
    if isinstance(source, (str, Path)) and not (isinstance(source, str) and source.lstrip().startswith("[")):
        text = Path(source).read_text(encoding="utf-8")
        raw = _parse_json(text)
    elif isinstance(source, str):
        raw = _parse_json(source)
    else:
        raw = source
    if not isinstance(raw, (list, tuple)):
        raise TraceError("trace must be a JSON array of events")
    events: list[ChurnEvent] = []
    last_at = None
    for i, rec in enumerate(raw):
        if not isinstance(rec, Mapping) or not {"at", "kind", "payload"} <= set(rec):
            raise TraceError(f"trace[{i}]: events need 'at', 'kind' and 'payload'")
        kind = str(rec["kind"])
        if kind not in ChurnEvent.KINDS:
            raise TraceError(f"trace[{i}]: unknown event kind {kind!r}")
        at = int(rec["at"])
        if last_at is not None and at < last_at:
            raise TraceError(f"trace[{i}]: timestamps must be non-decreasing ({at} after {last_at})")
        last_at = at
        events.append(ChurnEvent(at=at, kind=kind, payload=rec["payload"]))
    return events


def _parse_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise TraceError(f"malformed trace: {exc}") from exc


def _percentile(values: Sequence[float], q: float) -> float:
    if not values:
        return 0.0
    ordered = sorted(values)
    idx = min(len(ordered) - 1, max(0, int(round(q * (len(ordered) - 1)))))
    return ordered[idx]


def _aggregate(samples: Sequence[float]) -> dict:
    if not samples:
        return {"count": 0, "mean_us": 0.0, "p95_us": 0.0}
    return {
        "count": len(samples),
        "mean_us": sum(samples) / len(samples),
        "p95_us": _percentile(samples, 0.95),
    }


def run_scenario(
    trace: Sequence[ChurnEvent],
    context: OntologyContext,
    config: Optional[SimConfig] = None,
) -> RunReport:
    """Replay a churn trace through a fresh registry.

    Per-event validation failures become diagnostics on the event's decision
    record instead of aborting the run. Decisions are deterministic for a
    fixed (trace, ontologies, config); latencies are wall-clock.
    """
    cfg = config or SimConfig()
    registry = Registry(
        as_store(context), table=cfg.table,
        proxy_capacity=cfg.proxy_capacity, proxy_ttl=cfg.proxy_ttl,
    )
    report = RunReport()
    match_us: list[float] = []
    plan_us: list[float] = []

    for event in trace:
        outcome: dict = {}
        error = None
        t0 = time.perf_counter_ns()
        try:
            if event.kind == "register":
                service = parse_service(event.payload)
                rebinds = registry.register(service)
                outcome = {"service": service.id, "rebinds": [d.to_dict() for d in rebinds]}
                subject = service.id
            elif event.kind == "unregister":
                subject = event.payload if isinstance(event.payload, str) else str(event.payload.get("id"))
                plan, rebinds = registry.unregister(subject)
                outcome = {"plan": plan.to_dict(), "rebinds": [d.to_dict() for d in rebinds]}
            else:
                profile = ApplicationProfile.parse(event.payload)
                binding = registry.bind(profile)
                outcome = {"binding": binding.to_dict()}
                subject = profile.app
        except (RegistryError, DescriptorError, QosError, ValueError) as exc:
            subject = None
            error = str(exc)
        latency_us = max(1, time.perf_counter_ns() - t0) / 1e3
        if error is None:
            match_us.append(registry.last_event_timing["match_us"])
            plan_us.append(registry.last_event_timing["plan_us"])
        report.decisions.append({
            "at": event.at,
            "kind": event.kind,
            "subject": subject,
            "outcome": outcome,
            "error": error,
            "latency_us": latency_us,
        })

    report.timings = {"match": _aggregate(match_us), "plan": _aggregate(plan_us)}
    report.bindings = {app: b.to_dict() for app, b in sorted(registry.bindings.items())}
    report.events = list(registry.events)
    return report


# -- synthetic populations -----------------------------------------------------


def build_bench_ontology(families: int = 8, depth: int = 3, fanout: int = 2) -> Ontology:
    """Deterministic ontology of independent concept chains for benchmarks.

    Each family is a rooted tree `f<i>` with `depth` levels and `fanout`
    children per node, giving plenty of super-/sub-concept pairs.
    """
    concepts: list[str] = []
    edges: list[tuple[str, str]] = []
    for f in range(families):
        root = f"f{f}"
        concepts.append(root)
        level = [root]
        for d in range(depth):
            nxt = []
            for parent in level:
                for k in range(fanout):
                    child = f"{parent}_{d}{k}"
                    concepts.append(child)
                    edges.append((parent, child))
                    nxt.append(child)
            level = nxt
    return Ontology(id="bench-ont", concepts=concepts, subsumption=edges)


DEFAULT_NFP_RANGES: dict[str, tuple[float, float, str]] = {
    "latency": (1.0, 100.0, "<"),
    "throughput": (10.0, 1000.0, ">"),
}


def generate_population(
    n: int,
    ontology: Ontology,
    nfp_ranges: Optional[Mapping[str, tuple[float, float, str]]] = None,
    seed: int = 0,
    max_operations: int = 2,
    clone_rate: float = 0.35,
    narrow_rate: float = 0.3,
) -> list[Service]:
    """Generate `n` synthetic services over a seeded ontology, deterministically.

    A fraction of services clone an earlier interface (building equivalence
    classes); cloned interfaces sometimes narrow concepts to a sub-concept,
    which yields almost-equivalent variants. Quantitative properties draw
    uniformly from `nfp_ranges`; one qualitative property draws from leaf
    concepts.
    """
    if n < 1:
        raise ValueError("population size must be at least 1")
    rng = random.Random(seed)
    ranges = dict(nfp_ranges or DEFAULT_NFP_RANGES)
    names = sorted(ontology.concepts)
    children: dict[str, list[str]] = {c: [] for c in names}
    for parent, child in ontology.subsumption:
        children[parent].append(child)
    leaves = [c for c in names if not children[c]]

    def narrow(concept: str) -> str:
        options = children[concept]
        if options and rng.random() < narrow_rate:
            return narrow(rng.choice(options))
        return concept

    def fresh_operation(tag: str) -> Operation:
        concept = rng.choice(names)
        nfps: list = []
        for prop, (lo, hi, op_) in ranges.items():
            nfps.append(QuantitativeNfp(name=prop, value=round(rng.uniform(lo, hi), 3), operator=op_))
        nfps.append(QualitativeNfp(name="flavor", semantic=ConceptRef(ontology.id, rng.choice(leaves))))
        inputs = tuple(
            Parameter(
                name=f"p{k}",
                type=TypeRef(language="synthetic", name="Value"),
                semantic=ConceptRef(ontology.id, rng.choice(names)),
            )
            for k in range(rng.randint(0, 2))
        )
        output = None
        if rng.random() < 0.7:
            output = OutputSpec(type=TypeRef("synthetic", "Out"), semantic=ConceptRef(ontology.id, rng.choice(names)))
        return Operation(
            concept=NamedConcept(name=tag, semantic=ConceptRef(ontology.id, concept)),
            inputs=inputs, output=output, nfps=tuple(nfps),
        )

    def reskin(op: Operation, tag: str) -> Operation:
        nfps = []
        for np in op.nfps:
            if isinstance(np, QuantitativeNfp):
                lo, hi, op_ = ranges[np.name]
                nfps.append(QuantitativeNfp(name=np.name, value=round(rng.uniform(lo, hi), 3), operator=op_))
            else:
                nfps.append(QualitativeNfp(name=np.name, semantic=ConceptRef(ontology.id, rng.choice(leaves))))
        return Operation(
            concept=NamedConcept(name=tag, semantic=ConceptRef(ontology.id, narrow(op.concept.semantic.name))),
            inputs=tuple(
                Parameter(p.name, p.type, ConceptRef(ontology.id, narrow(p.semantic.name))) for p in op.inputs
            ),
            output=None if op.output is None
            else OutputSpec(op.output.type, ConceptRef(ontology.id, narrow(op.output.semantic.name))),
            nfps=tuple(nfps),
        )

    services: list[Service] = []
    for i in range(n):
        sid = f"svc{i:03d}"
        if services and rng.random() < clone_rate:
            template = rng.choice(services)
            ops = tuple(reskin(op, op.name) for op in template.interface.operations)
        else:
            ops = tuple(fresh_operation(f"op{k}") for k in range(rng.randint(1, max_operations)))
        services.append(Service(id=sid, interface=Interface(operations=ops), metadata={"origin": "synthetic"}))
    return services


# -- benchmark harness -----------------------------------------------------------


def bench(
    n: int,
    seed: int = 0,
    sizes: Optional[Sequence[int]] = None,
    ontology: Optional[Ontology] = None,
) -> list[dict]:
    """Pairwise-matching and departure-planning timings at increasing scales."""
    onto = ontology or build_bench_ontology()
    steps = sorted({s for s in (sizes or (8, 25, 50, 100)) if s <= n} | {n})
    rows: list[dict] = []
    for size in steps:
        services = generate_population(size, onto, seed=seed)
        store = as_store(onto)

        t0 = time.perf_counter_ns()
        for a in services:
            for b in services:
                if a.id != b.id:
                    match_interfaces(store, a.interface, b.interface)
        pairwise_ms = (time.perf_counter_ns() - t0) / 1e6

        registry = Registry(store)
        for s in services:
            registry.register(s)
        target = services[-1]
        t1 = time.perf_counter_ns()
        registry.plan_for(target.id)
        plan_ms = (time.perf_counter_ns() - t1) / 1e6

        rows.append({"n": size, "pairwise_match_ms": pairwise_ms, "plan_ms": plan_ms})
    return rows


def services_to_dicts(services: Sequence[Service]) -> list[dict]:
    return [service_to_dict(s) for s in services]
