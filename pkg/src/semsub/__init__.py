"""Semantic service substitution: matching, QoS degrees and churn-driven planning."""

from .ontology import (
    ConceptRef,
    CycleError,
    DEFAULT_DISTANCES,
    DistanceTable,
    MatchValue,
    Ontology,
    OntologyError,
    OntologyStore,
    UnknownConceptError,
    concept_distance,
    load_ontology,
    match_concepts,
)
from .model import (
    DescriptorError,
    Diagnostic,
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
    validate_service,
)
from .matching import (
    InterfaceMatch,
    MatchingError,
    OperationMatch,
    almost_equivalent_interfaces,
    almost_equivalent_interfaces_over,
    almost_equivalent_operations,
    best_cover,
    comparable_operations,
    equivalent_interfaces,
    equivalent_interfaces_over,
    equivalent_operations,
    interface_distance,
    match_interfaces,
    match_interfaces_over,
    match_operations,
    operation_distance,
)
from .qos import (
    Population,
    QosError,
    build_populations,
    eta,
    ql_degree,
    qn_degree,
    qos_degree,
    service_qos_degree,
    z_score,
)
from .registry import (
    ApplicationProfile,
    Binding,
    BindingMode,
    DuplicateServiceError,
    PlanEntry,
    ProxyQueue,
    RebindDecision,
    Registry,
    RegistryError,
    RegistryValidationError,
    SubstitutionPlan,
    UnknownServiceError,
)
from .sim import (
    ChurnEvent,
    RunReport,
    SimConfig,
    TraceError,
    bench,
    build_bench_ontology,
    generate_population,
    load_trace,
    run_scenario,
)

__version__ = "0.1.0"
