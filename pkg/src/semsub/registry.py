"""Live service registry: bindings, churn events and substitution planning.

The registry holds the environment's registered services and the bindings of
applications to them. On service appearance it checks whether the newcomer
improves any bound application (strictly lower QoS degree against the
application's reference values) and rebinds when it does; on disappearance it
builds a tiered substitution plan — equivalent candidates, almost-equivalent
candidates, candidates covering the application's required operations, then
subsume-matching candidates flagged degraded — and falls back to a bounded
proxy queue when every tier is empty.

Churn events are processed strictly serially; plan computation itself is pure.
Each decision appends one record to the event log with the fields
{event, service, app, chosen, tier, degree, latency_us}.
"""

from __future__ import annotations

import threading
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import wraps
from typing import Callable, Mapping, Optional, Sequence

from .matching import best_cover, match_interfaces
from .model import (
    DescriptorError,
    Interface,
    Nfp,
    Operation,
    Service,
    operation_to_dict,
    parse_interface,
    parse_nfp,
    validate_service,
)
from .ontology import DEFAULT_DISTANCES, DistanceTable, MatchValue, OntologyStore
from .qos import Population, QosError, build_populations, service_qos_degree


def _locked(method):
    """Serialize a registry method on the instance lock."""

    @wraps(method)
    def wrapper(self, *args, **kwargs):
        with self._lock:
            return method(self, *args, **kwargs)

    return wrapper


class RegistryError(Exception):
    """Registry-level failure (duplicate ids, unknown ids, invalid input)."""


class DuplicateServiceError(RegistryError):
    pass


class UnknownServiceError(RegistryError):
    pass


class RegistryValidationError(RegistryError):
    def __init__(self, message: str, diagnostics: Sequence[object] = ()) -> None:
        super().__init__(message)
        self.diagnostics = list(diagnostics)


class BindingMode(str, Enum):
    DIRECT = "direct"
    SUBSET = "subset"
    SUBSUME = "subsume-fallback"
    PROXIED = "proxied"


_TIER_RANK = {BindingMode.DIRECT: 0, BindingMode.SUBSET: 1, BindingMode.SUBSUME: 2, BindingMode.PROXIED: 3}


@dataclass
class ProxyQueue:
    """Bounded FIFO of pending calls for a vanished interface.

    When full, the oldest entry is evicted. Entries older than `ttl` clock
    ticks are discarded as expired at flush time.
    """

    capacity: int = 1024
    ttl: Optional[int] = None
    entries: deque = field(default_factory=deque)

    def push(self, at: int, payload: object) -> int:
        evicted = 0
        while len(self.entries) >= self.capacity:
            self.entries.popleft()
            evicted += 1
        self.entries.append((at, payload))
        return evicted

    def flush(self, now: int) -> tuple[list[object], int]:
        delivered: list[object] = []
        expired = 0
        while self.entries:
            at, payload = self.entries.popleft()
            if self.ttl is not None and now - at > self.ttl:
                expired += 1
            else:
                delivered.append(payload)
        return delivered, expired

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class ApplicationProfile:
    """What an application requires: an interface, optional operation subset,
    desired reference values for the non-functional properties, and weights."""

    app: str
    interface: Interface
    operations: Optional[tuple[str, ...]] = None
    reference: tuple[Nfp, ...] = ()
    weights: Optional[Mapping[str, float]] = None

    def __post_init__(self) -> None:
        if not self.app:
            raise DescriptorError("profile must name an app")
        if self.operations is not None:
            known = {op.name for op in self.interface.operations}
            unknown = [n for n in self.operations if n not in known]
            if unknown:
                raise DescriptorError(f"profile {self.app!r}: unknown required operations {unknown}")
        if self.weights is not None:
            if any(w < 0 for w in self.weights.values()):
                raise DescriptorError(f"profile {self.app!r}: weights must be non-negative")
            total = sum(self.weights.values())
            if abs(total - 1.0) > 1e-9:
                raise DescriptorError(f"profile {self.app!r}: weights must sum to 1, got {total!r}")

    @classmethod
    def parse(cls, doc: Mapping) -> "ApplicationProfile":
        if "app" not in doc or "interface" not in doc:
            raise DescriptorError("profile must define 'app' and 'interface'")
        reference: tuple[Nfp, ...] = ()
        if doc.get("reference"):
            nfps = doc["reference"].get("nfps", [])
            reference = tuple(parse_nfp(n, f"reference.nfps[{i}]") for i, n in enumerate(nfps))
        ops = doc.get("operations")
        return cls(
            app=str(doc["app"]),
            interface=parse_interface(doc["interface"]),
            operations=tuple(str(n) for n in ops) if ops else None,
            reference=reference,
            weights=dict(doc["weights"]) if doc.get("weights") else None,
        )

    def reference_operation(self) -> Optional[Operation]:
        """Synthetic operation carrying the desired reference values."""
        if not self.reference:
            return None
        return Operation(concept=self.interface.operations[0].concept, inputs=(), output=None, nfps=self.reference)

    def required_operations(self) -> tuple[Operation, ...]:
        if self.operations is None:
            return self.interface.operations
        return tuple(self.interface.operation(n) for n in self.operations)

    def to_dict(self) -> dict:
        doc: dict = {
            "app": self.app,
            "interface": {"operations": [operation_to_dict(op) for op in self.interface.operations]},
        }
        if self.operations is not None:
            doc["operations"] = list(self.operations)
        if self.reference:
            doc["reference"] = {"nfps": operation_to_dict(Operation(
                concept=self.interface.operations[0].concept, nfps=self.reference))["nfps"]}
        if self.weights is not None:
            doc["weights"] = dict(self.weights)
        return doc


@dataclass
class Binding:
    app: str
    service: Optional[str]
    bound_at: int
    mode: BindingMode
    subset: Optional[tuple[str, ...]] = None
    queue: Optional[ProxyQueue] = None

    def to_dict(self) -> dict:
        return {
            "app": self.app,
            "service": self.service,
            "bound_at": self.bound_at,
            "mode": self.mode.value,
            "subset": list(self.subset) if self.subset else None,
            "queued_calls": len(self.queue) if self.queue is not None else 0,
        }


@dataclass(frozen=True)
class PlanEntry:
    service: str
    degree: float
    subset: Optional[tuple[str, ...]] = None

    def to_dict(self) -> dict:
        doc = {"service": self.service, "degree": self.degree}
        if self.subset is not None:
            doc["subset"] = list(self.subset)
        return doc


@dataclass(frozen=True)
class SubstitutionPlan:
    """Tiered, QoS-ordered candidates for replacing one service."""

    service: str
    t_equiv: tuple[PlanEntry, ...]
    t_almost: tuple[PlanEntry, ...]
    t_subset: tuple[PlanEntry, ...]
    t_subsume: tuple[PlanEntry, ...]
    proxy_fallback: bool

    def to_dict(self) -> dict:
        return {
            "service": self.service,
            "t_equiv": [e.to_dict() for e in self.t_equiv],
            "t_almost": [e.to_dict() for e in self.t_almost],
            "t_subset": [e.to_dict() for e in self.t_subset],
            "t_subsume": [e.to_dict() for e in self.t_subsume],
            "proxy_fallback": self.proxy_fallback,
        }


@dataclass(frozen=True)
class RebindDecision:
    app: str
    from_service: Optional[str]
    to_service: Optional[str]
    mode: BindingMode
    degree: Optional[float]
    flushed: int = 0
    expired: int = 0

    def to_dict(self) -> dict:
        return {
            "app": self.app,
            "from": self.from_service,
            "to": self.to_service,
            "mode": self.mode.value,
            "degree": self.degree,
            "flushed": self.flushed,
            "expired": self.expired,
        }


class Registry:
    """Single-writer registry of services and application bindings.

    Churn events (register, unregister, bind, proxied calls) serialize on an
    internal lock, so concurrent callers observe atomic per-event transitions.
    """

    def __init__(
        self,
        store: OntologyStore,
        table: DistanceTable = DEFAULT_DISTANCES,
        proxy_capacity: int = 1024,
        proxy_ttl: Optional[int] = None,
        event_sink: Optional[Callable[[dict], None]] = None,
    ) -> None:
        self.store = store
        self.table = table
        self.proxy_capacity = proxy_capacity
        self.proxy_ttl = proxy_ttl
        self.services: dict[str, Service] = {}
        self.bindings: dict[str, Binding] = {}
        self.profiles: dict[str, ApplicationProfile] = {}
        self.events: list[dict] = []
        self.last_event_timing: dict[str, float] = {"match_us": 0.0, "plan_us": 0.0}
        self._departed: dict[str, Service] = {}
        self._registered_at: dict[str, int] = {}
        self._event_sink = event_sink
        self._clock = 0
        self._lock = threading.RLock()

    # -- event log -------------------------------------------------------------

    def _log(self, records: list[dict], latency_us: float) -> None:
        for rec in records:
            rec["latency_us"] = latency_us
            self.events.append(rec)
            if self._event_sink is not None:
                self._event_sink(rec)

    @staticmethod
    def _record(event: str, service: Optional[str], app: Optional[str], chosen: Optional[str],
                tier: Optional[str], degree: Optional[float]) -> dict:
        return {"event": event, "service": service, "app": app, "chosen": chosen, "tier": tier, "degree": degree}

    # -- lookup helpers ----------------------------------------------------------

    def service(self, service_id: str) -> Service:
        try:
            return self.services[service_id]
        except KeyError:
            if service_id in self._departed:
                return self._departed[service_id]
            raise UnknownServiceError(f"service {service_id!r} is not registered") from None

    def _weights_for(self, profile: Optional[ApplicationProfile], reference_ops: Sequence[Operation]):
        """Profile weights when they exactly cover the reference properties, else uniform."""
        if profile is None or profile.weights is None:
            return None
        names = {np.name for op in reference_ops for np in op.nfps}
        if names and set(profile.weights) == names:
            return dict(profile.weights)
        return None

    def _population_entries(self, services: Sequence[Service]) -> list[tuple[str, Operation]]:
        return [(s.id, op) for s in services for op in s.interface.operations]

    def _degree(
        self,
        reference_ops: Sequence[Operation],
        candidate: Service,
        pairing: Sequence[tuple[int, int]],
        populations: Mapping[str, Population],
        weights: Optional[Mapping[str, float]],
    ) -> float:
        try:
            return service_qos_degree(
                self.store, list(reference_ops), candidate,
                pairing=list(pairing), nfp_weights=weights, populations=populations, table=self.table,
            )
        except QosError:
            # Property sets that do not line up with the reference rank last.
            return 1.0

    # -- planning ---------------------------------------------------------------

    @_locked
    def plan_for(self, service_id: str, profile: Optional[ApplicationProfile] = None) -> SubstitutionPlan:
        """Full substitution plan for a departing (or departed) service.

        Pure: bindings are not touched. Candidate tiers are exclusive (best
        match class wins) and each tier is ordered by ascending QoS degree
        against the departed service, ties broken by registration order.
        """
        si = self.service(service_id)
        candidates = [s for sid, s in self.services.items() if sid != service_id]

        relations: dict[str, tuple[MatchValue, tuple[tuple[int, int], ...]]] = {}
        covers: dict[str, tuple[MatchValue, tuple[tuple[int, int], ...]]] = {}
        subset_targets = self._subset_targets(si, profile)
        for cand in candidates:
            matched = match_interfaces(self.store, cand.interface, si.interface, self.table)
            relations[cand.id] = (matched.value, matched.pairing or ())
            if subset_targets and matched.value not in (MatchValue.EXACT, MatchValue.PLUGIN):
                covers[cand.id] = best_cover(self.store, cand.interface, [op for _, op in subset_targets], self.table)

        tiers: dict[BindingMode, list[tuple[float, int, PlanEntry]]] = {
            BindingMode.DIRECT: [], BindingMode.SUBSET: [], BindingMode.SUBSUME: []}
        t_equiv: list[tuple[float, int, PlanEntry]] = []

        pool = [si] + candidates
        reference_op_entries = self._population_entries(pool)
        if profile is not None:
            reference_op = profile.reference_operation()
            if reference_op is not None:
                reference_op_entries.append((f"{profile.app}:reference", reference_op))
        populations = build_populations(reference_op_entries)
        ref_ops = list(si.interface.operations)
        weights = self._weights_for(profile, ref_ops)

        for cand in candidates:
            value, pairing = relations[cand.id]
            seq = self._registered_at.get(cand.id, 0)
            if value in (MatchValue.EXACT, MatchValue.PLUGIN):
                ref_to_cand = tuple((c, r) for r, c in pairing)
                degree = self._degree(ref_ops, cand, ref_to_cand, populations, weights)
                entry = PlanEntry(service=cand.id, degree=degree)
                (t_equiv if value is MatchValue.EXACT else tiers[BindingMode.DIRECT]).append((degree, seq, entry))
            elif cand.id in covers and covers[cand.id][0] in (MatchValue.EXACT, MatchValue.PLUGIN):
                cover_value, cover_pairing = covers[cand.id]
                target_ops = [op for _, op in subset_targets]
                degree = self._degree(target_ops, cand, cover_pairing, populations, weights)
                chosen_ops = tuple(cand.interface.operations[c].name for _, c in cover_pairing)
                tiers[BindingMode.SUBSET].append((degree, seq, PlanEntry(cand.id, degree, subset=chosen_ops)))
            elif value is MatchValue.SUBSUME:
                ref_to_cand = tuple((c, r) for r, c in pairing)
                degree = self._degree(ref_ops, cand, ref_to_cand, populations, weights)
                tiers[BindingMode.SUBSUME].append((degree, seq, PlanEntry(cand.id, degree)))

        def ordered(rows: list[tuple[float, int, PlanEntry]]) -> tuple[PlanEntry, ...]:
            return tuple(e for _, _, e in sorted(rows, key=lambda r: (r[0], r[1])))

        plan = SubstitutionPlan(
            service=service_id,
            t_equiv=ordered(t_equiv),
            t_almost=ordered(tiers[BindingMode.DIRECT]),
            t_subset=ordered(tiers[BindingMode.SUBSET]),
            t_subsume=ordered(tiers[BindingMode.SUBSUME]),
            proxy_fallback=not (t_equiv or tiers[BindingMode.DIRECT] or tiers[BindingMode.SUBSET]
                                or tiers[BindingMode.SUBSUME]),
        )
        return plan

    def _subset_targets(self, si: Service, profile: Optional[ApplicationProfile]) -> list[tuple[str, Operation]]:
        """Operations of the departed service that must stay covered.

        The application's declared operation subset when it gave one;
        otherwise every operation of the departed service, which lets larger
        candidates qualify even though full matching fails on arity.
        """
        if profile is None or profile.operations is None:
            return [(op.name, op) for op in si.interface.operations]
        targets = []
        for name in profile.operations:
            try:
                targets.append((name, si.interface.operation(name)))
            except KeyError:
                continue
        return targets

    # -- churn events ---------------------------------------------------------

    @_locked
    def register(self, service: Service) -> list[RebindDecision]:
        """Add a service; rebind applications it strictly improves; flush proxies."""
        t0 = time.perf_counter_ns()
        if service.id in self.services:
            raise DuplicateServiceError(f"service {service.id!r} already registered")
        diagnostics = validate_service(service, self.store)
        if diagnostics:
            raise RegistryValidationError(
                f"service {service.id!r} has {len(diagnostics)} unresolved references", diagnostics)
        self._clock += 1
        self.services[service.id] = service
        self._registered_at[service.id] = self._clock
        self._departed.pop(service.id, None)

        t1 = time.perf_counter_ns()
        decisions: list[RebindDecision] = []
        records: list[dict] = []
        for app in sorted(self.bindings):
            decision = self._consider_appearance(app, service)
            if decision is not None:
                decisions.append(decision)
                records.append(self._record(
                    "register", service.id, app, decision.to_service, decision.mode.value, decision.degree))
        t2 = time.perf_counter_ns()
        self.last_event_timing = {"match_us": (t1 - t0) / 1e3, "plan_us": (t2 - t1) / 1e3}
        self._log(records, (t2 - t0) / 1e3)
        return decisions

    def _consider_appearance(self, app: str, service: Service) -> Optional[RebindDecision]:
        binding = self.bindings[app]
        profile = self.profiles[app]

        if binding.mode is BindingMode.PROXIED:
            choice = self._choose(profile)
            if choice is None:
                return None
            chosen, mode, degree, subset, _ = choice
            flushed, expired = binding.queue.flush(self._clock) if binding.queue else ([], 0)
            self.bindings[app] = Binding(app=app, service=chosen, bound_at=self._clock, mode=mode, subset=subset)
            return RebindDecision(app, None, chosen, mode, degree, flushed=len(flushed), expired=expired)

        if binding.mode in (BindingMode.SUBSET, BindingMode.SUBSUME):
            # Degraded bindings are reconsidered from scratch on every appearance.
            choice = self._choose(profile)
            if choice is None:
                return None
            chosen, mode, degree, subset, scores = choice
            if chosen == binding.service and mode is binding.mode:
                return None
            incumbent_rank = _TIER_RANK[binding.mode]
            if _TIER_RANK[mode] > incumbent_rank:
                return None
            if _TIER_RANK[mode] == incumbent_rank:
                incumbent_degree = scores.get(binding.service)
                # Same tier: never rebind on a tie with a still-eligible incumbent.
                if incumbent_degree is not None and not (degree is not None and degree < incumbent_degree):
                    return None
            self.bindings[app] = Binding(app=app, service=chosen, bound_at=self._clock, mode=mode, subset=subset)
            return RebindDecision(app, binding.service, chosen, mode, degree)

        incumbent = self.services.get(binding.service)
        if incumbent is None or service.id == incumbent.id:
            return None
        matched = match_interfaces(self.store, service.interface, incumbent.interface, self.table)
        if matched.value not in (MatchValue.EXACT, MatchValue.PLUGIN):
            return None
        reference_op = profile.reference_operation()
        if reference_op is None:
            return None  # no expressed preferences: keep the incumbent
        related = [service] + [
            s for sid, s in self.services.items()
            if sid != service.id
            and match_interfaces(self.store, service.interface, s.interface, self.table).value
            in (MatchValue.EXACT, MatchValue.PLUGIN)
        ]
        entries = self._population_entries(related)
        entries.append((f"{profile.app}:reference", reference_op))
        populations = build_populations(entries)
        weights = self._weights_for(profile, [reference_op])
        deg_new = self._degree([reference_op], service, [(0, self._scoring_op_index(service, profile))],
                               populations, weights)
        deg_old = self._degree([reference_op], incumbent, [(0, self._scoring_op_index(incumbent, profile))],
                               populations, weights)
        if deg_new < deg_old:
            self.bindings[app] = Binding(app=app, service=service.id, bound_at=self._clock, mode=BindingMode.DIRECT)
            return RebindDecision(app, incumbent.id, service.id, BindingMode.DIRECT, deg_new)
        return None

    @_locked
    def unregister(self, service_id: str) -> tuple[SubstitutionPlan, list[RebindDecision]]:
        """Remove a service, rebind every affected application, return the plan."""
        t0 = time.perf_counter_ns()
        if service_id not in self.services:
            raise UnknownServiceError(f"service {service_id!r} is not registered")
        self._clock += 1
        departed = self.services.pop(service_id)
        self._departed[service_id] = departed

        plan = self.plan_for(service_id)
        t1 = time.perf_counter_ns()

        decisions: list[RebindDecision] = []
        records: list[dict] = []
        for app in sorted(self.bindings):
            binding = self.bindings[app]
            if binding.service != service_id:
                continue
            profile = self.profiles[app]
            app_plan = self.plan_for(service_id, profile)
            decision = self._rebind_from_plan(app, binding, app_plan)
            decisions.append(decision)
            records.append(self._record(
                "unregister", service_id, app, decision.to_service, decision.mode.value, decision.degree))
        t2 = time.perf_counter_ns()
        self.last_event_timing = {"match_us": (t1 - t0) / 1e3, "plan_us": (t2 - t1) / 1e3}
        self._log(records, (t2 - t0) / 1e3)
        return plan, decisions

    def _rebind_from_plan(self, app: str, binding: Binding, plan: SubstitutionPlan) -> RebindDecision:
        for entries, mode in (
            (plan.t_equiv, BindingMode.DIRECT),
            (plan.t_almost, BindingMode.DIRECT),
            (plan.t_subset, BindingMode.SUBSET),
            (plan.t_subsume, BindingMode.SUBSUME),
        ):
            if entries:
                head = entries[0]
                self.bindings[app] = Binding(
                    app=app, service=head.service, bound_at=self._clock, mode=mode, subset=head.subset)
                return RebindDecision(app, binding.service, head.service, mode, head.degree)
        queue = ProxyQueue(capacity=self.proxy_capacity, ttl=self.proxy_ttl)
        self.bindings[app] = Binding(
            app=app, service=None, bound_at=self._clock, mode=BindingMode.PROXIED, queue=queue)
        return RebindDecision(app, binding.service, None, BindingMode.PROXIED, None)

    @_locked
    def bind(self, profile: ApplicationProfile) -> Binding:
        """Bind an application to the best interface-satisfying service.

        Falls back to a proxied binding when nothing satisfies the profile.
        Rebinding an already-bound app replaces its profile and binding.
        """
        t0 = time.perf_counter_ns()
        self._clock += 1
        self.profiles[profile.app] = profile
        choice = self._choose(profile)
        t1 = time.perf_counter_ns()
        if choice is None:
            queue = ProxyQueue(capacity=self.proxy_capacity, ttl=self.proxy_ttl)
            binding = Binding(app=profile.app, service=None, bound_at=self._clock,
                              mode=BindingMode.PROXIED, queue=queue)
        else:
            chosen, mode, degree, subset, _ = choice
            binding = Binding(app=profile.app, service=chosen, bound_at=self._clock, mode=mode, subset=subset)
        self.bindings[profile.app] = binding
        t2 = time.perf_counter_ns()
        self.last_event_timing = {"match_us": (t1 - t0) / 1e3, "plan_us": (t2 - t1) / 1e3}
        record = self._record("bind", binding.service, profile.app, binding.service,
                              binding.mode.value, choice[2] if choice else None)
        self._log([record], (t2 - t0) / 1e3)
        return binding

    def _choose(
        self, profile: ApplicationProfile
    ) -> Optional[tuple[str, BindingMode, Optional[float], Optional[tuple[str, ...]], dict[str, float]]]:
        """Best current service for a profile.

        Returns (service, mode, degree, covering op names, per-service degrees
        of the winning tier), or None when nothing satisfies the profile.
        """
        required = profile.interface
        required_ops = list(profile.required_operations())
        direct: list[tuple[str, tuple[tuple[int, int], ...]]] = []
        subset: list[tuple[str, tuple[tuple[int, int], ...]]] = []
        degraded: list[tuple[str, tuple[tuple[int, int], ...]]] = []
        for sid in self.services:
            cand = self.services[sid]
            matched = match_interfaces(self.store, cand.interface, required, self.table)
            if matched.value in (MatchValue.EXACT, MatchValue.PLUGIN):
                direct.append((sid, matched.pairing or ()))
                continue
            cover_value, cover_pairing = best_cover(self.store, cand.interface, required_ops, self.table)
            if cover_value in (MatchValue.EXACT, MatchValue.PLUGIN):
                subset.append((sid, cover_pairing))
            elif matched.value is MatchValue.SUBSUME:
                degraded.append((sid, matched.pairing or ()))

        for pool, mode in (
            (direct, BindingMode.DIRECT),
            (subset, BindingMode.SUBSET),
            (degraded, BindingMode.SUBSUME),
        ):
            if not pool:
                continue
            reference_op = profile.reference_operation()
            if reference_op is None:
                sid, pairing = min(pool, key=lambda row: self._registered_at.get(row[0], 0))
                chosen_subset = self._cover_names(sid, pairing, mode)
                return sid, mode, None, chosen_subset, {}
            candidates = [self.services[sid] for sid, _ in pool]
            entries = self._population_entries(candidates)
            entries.append((f"{profile.app}:reference", reference_op))
            populations = build_populations(entries)
            weights = self._weights_for(profile, [reference_op])
            scored = []
            for sid, pairing in pool:
                op_index = self._paired_op_index(pairing, mode)
                degree = self._degree([reference_op], self.services[sid], [(0, op_index)], populations, weights)
                scored.append((degree, self._registered_at.get(sid, 0), sid, pairing))
            degree, _, sid, pairing = min(scored, key=lambda row: (row[0], row[1]))
            chosen_subset = self._cover_names(sid, pairing, mode)
            return sid, mode, degree, chosen_subset, {s: d for d, _, s, _ in scored}
        return None

    @staticmethod
    def _paired_op_index(pairing: Sequence[tuple[int, int]], mode: BindingMode) -> int:
        """Candidate operation carrying the QoS offer for the first required op."""
        if not pairing:
            return 0
        if mode is BindingMode.SUBSET:
            for target, cand in pairing:  # cover pairing: target -> candidate op
                if target == 0:
                    return cand
            return pairing[0][1]
        for cand, req in pairing:  # interface pairing: candidate op -> required op
            if req == 0:
                return cand
        return pairing[0][0]

    def _scoring_op_index(self, service: Service, profile: ApplicationProfile) -> int:
        matched = match_interfaces(self.store, service.interface, profile.interface, self.table)
        if matched.pairing:
            return self._paired_op_index(matched.pairing, BindingMode.DIRECT)
        _, cover_pairing = best_cover(
            self.store, service.interface, list(profile.required_operations()), self.table)
        if cover_pairing:
            return self._paired_op_index(cover_pairing, BindingMode.SUBSET)
        return 0

    def _cover_names(self, sid: str, pairing: Sequence[tuple[int, int]], mode: BindingMode) -> Optional[tuple[str, ...]]:
        if mode is not BindingMode.SUBSET:
            return None
        ops = self.services[sid].interface.operations
        return tuple(ops[c].name for _, c in pairing)

    # -- proxy calls -------------------------------------------------------------

    @_locked
    def enqueue_call(self, app: str, payload: object) -> dict:
        """Queue a call for a proxied application; no-op delivery for bound apps."""
        binding = self.bindings.get(app)
        if binding is None:
            raise RegistryError(f"app {app!r} has no binding")
        if binding.mode is not BindingMode.PROXIED:
            return {"queued": False, "delivered_to": binding.service}
        evicted = binding.queue.push(self._clock, payload)
        return {"queued": True, "evicted": evicted, "pending": len(binding.queue)}
