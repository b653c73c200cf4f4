"""Concept ontologies: subsumption hierarchies, concept matching and concept distance.

An ontology is a DAG of named concepts. Subsumption edges point from a concept
to the more specific concepts it covers (parent -> child). Equivalence links
declare that two concepts are interchangeable; ancestry propagates through
them, so matching is computed on the quotient graph of equivalence classes.

Loaded ontologies are immutable and all queries are pure, so instances can be
shared freely across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import Iterable, Mapping, Union


class OntologyError(Exception):
    """Malformed ontology document or broken ontology invariant."""


class CycleError(OntologyError):
    """The subsumption relation (over equivalence classes) contains a cycle."""


class UnknownConceptError(OntologyError):
    """A concept reference does not resolve against the loaded ontologies."""


class MatchValue(IntEnum):
    """Four-valued concept match, ordered best-first: lower is better."""

    EXACT = 0
    PLUGIN = 1
    SUBSUME = 2
    FAIL = 3

    @property
    def label(self) -> str:
        return _LABELS[self]

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return _LABELS[self]


_LABELS = {
    MatchValue.EXACT: "Exact",
    MatchValue.PLUGIN: "PlugIn",
    MatchValue.SUBSUME: "Subsume",
    MatchValue.FAIL: "Fail",
}

_BY_LABEL = {v: k for k, v in _LABELS.items()}


def match_value_from_label(label: str) -> MatchValue:
    try:
        return _BY_LABEL[label]
    except KeyError:
        raise ValueError(f"unknown match value {label!r}") from None


@dataclass(frozen=True)
class ConceptRef:
    """A concept named within a specific ontology."""

    ontology: str
    name: str

    def __str__(self) -> str:
        return f"{self.ontology}:{self.name}"


@dataclass(frozen=True)
class DistanceTable:
    """Per-match-class concept distances.

    Values must stay within [0, 1] and strictly increase from Exact to Fail,
    so that a smaller distance always means a better match.
    """

    exact: float = 0.0
    plugin: float = 0.2
    subsume: float = 0.8
    fail: float = 1.0

    def __post_init__(self) -> None:
        seq = (self.exact, self.plugin, self.subsume, self.fail)
        if any(v < 0.0 or v > 1.0 for v in seq):
            raise ValueError(f"distance values must lie in [0, 1], got {seq}")
        if not (self.exact < self.plugin < self.subsume < self.fail):
            raise ValueError(f"distance values must strictly increase Exact<PlugIn<Subsume<Fail, got {seq}")

    def of(self, value: MatchValue) -> float:
        return (self.exact, self.plugin, self.subsume, self.fail)[value]


DEFAULT_DISTANCES = DistanceTable()


class Ontology:
    """An immutable concept DAG answering match and distance queries.

    Equivalent concepts are collapsed into classes at construction time and
    every class gets a precomputed set of strict ancestors, which makes
    `match` a couple of dictionary lookups.
    """

    def __init__(
        self,
        id: str,
        concepts: Iterable[str],
        subsumption: Iterable[tuple[str, str]] = (),
        equivalences: Iterable[tuple[str, str]] = (),
    ) -> None:
        self.id = id
        names = list(concepts)
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise OntologyError(f"ontology {id!r}: duplicate concepts {dupes}")
        self.concepts: frozenset[str] = frozenset(names)
        self.subsumption: tuple[tuple[str, str], ...] = tuple((str(p), str(c)) for p, c in subsumption)
        self.equivalences: tuple[tuple[str, str], ...] = tuple((str(a), str(b)) for a, b in equivalences)

        for a, b in list(self.subsumption) + list(self.equivalences):
            for endpoint in (a, b):
                if endpoint not in self.concepts:
                    raise OntologyError(f"ontology {id!r}: edge endpoint {endpoint!r} is not a declared concept")

        self._class_of = self._union_equivalences(names, self.equivalences)
        self._ancestors = self._close_ancestors()

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def _union_equivalences(names: list[str], links: Iterable[tuple[str, str]]) -> dict[str, int]:
        parent: dict[str, str] = {n: n for n in names}

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in links:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        roots = sorted({find(n) for n in names})
        index = {r: i for i, r in enumerate(roots)}
        return {n: index[find(n)] for n in names}

    def _close_ancestors(self) -> dict[int, frozenset[int]]:
        children: dict[int, set[int]] = {c: set() for c in set(self._class_of.values())}
        indegree: dict[int, int] = {c: 0 for c in children}
        for p, c in self.subsumption:
            cp, cc = self._class_of[p], self._class_of[c]
            if cp == cc:
                raise CycleError(f"ontology {self.id!r}: {p!r} -> {c!r} subsumes within one equivalence class")
            if cc not in children[cp]:
                children[cp].add(cc)
                indegree[cc] += 1

        # Kahn topological order doubles as the cycle check.
        order: list[int] = [c for c, d in indegree.items() if d == 0]
        seen = 0
        ancestors: dict[int, set[int]] = {c: set() for c in children}
        queue = list(order)
        while queue:
            node = queue.pop()
            seen += 1
            for child in children[node]:
                ancestors[child].update(ancestors[node])
                ancestors[child].add(node)
                indegree[child] -= 1
                if indegree[child] == 0:
                    queue.append(child)
        if seen != len(children):
            stuck = sorted(n for c, d in indegree.items() if d > 0 for n, k in self._class_of.items() if k == c)
            raise CycleError(f"ontology {self.id!r}: subsumption cycle involving {stuck}")
        return {c: frozenset(a) for c, a in ancestors.items()}

    # -- queries ---------------------------------------------------------------

    def __contains__(self, name: str) -> bool:
        return name in self.concepts

    def __len__(self) -> int:
        return len(self.concepts)

    def _resolve(self, concept: Union[str, ConceptRef]) -> int:
        name = concept.name if isinstance(concept, ConceptRef) else concept
        if isinstance(concept, ConceptRef) and concept.ontology != self.id:
            raise UnknownConceptError(f"{concept} does not belong to ontology {self.id!r}")
        try:
            return self._class_of[name]
        except KeyError:
            raise UnknownConceptError(f"unknown concept {name!r} in ontology {self.id!r}") from None

    def match(self, n: Union[str, ConceptRef], m: Union[str, ConceptRef]) -> MatchValue:
        """Match two concepts of this ontology.

        Exact when they coincide or are declared equivalent, PlugIn when the
        first is a strict ancestor (super-concept) of the second, Subsume when
        it is a strict descendant, Fail otherwise. Refs from two different
        ontologies fail without resolving.
        """
        if isinstance(n, ConceptRef) and isinstance(m, ConceptRef) and n.ontology != m.ontology:
            return MatchValue.FAIL
        cn, cm = self._resolve(n), self._resolve(m)
        if cn == cm:
            return MatchValue.EXACT
        if cn in self._ancestors[cm]:
            return MatchValue.PLUGIN
        if cm in self._ancestors[cn]:
            return MatchValue.SUBSUME
        return MatchValue.FAIL

    def distance(
        self,
        n: Union[str, ConceptRef],
        m: Union[str, ConceptRef],
        table: DistanceTable = DEFAULT_DISTANCES,
    ) -> float:
        return table.of(self.match(n, m))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "concepts": sorted(self.concepts),
            "subsumption": [list(e) for e in self.subsumption],
            "equivalences": [list(e) for e in self.equivalences],
        }


class OntologyStore:
    """Resolves concept references across several loaded ontologies.

    Concepts from two different ontologies never match (Fail); referencing an
    ontology that is not loaded raises UnknownConceptError.
    """

    def __init__(self, ontologies: Iterable[Ontology] = ()) -> None:
        self._by_id: dict[str, Ontology] = {}
        for o in ontologies:
            self.add(o)

    def add(self, ontology: Ontology) -> Ontology:
        if ontology.id in self._by_id:
            raise OntologyError(f"ontology {ontology.id!r} already loaded")
        self._by_id[ontology.id] = ontology
        return ontology

    def __contains__(self, ontology_id: str) -> bool:
        return ontology_id in self._by_id

    def __iter__(self):
        return iter(self._by_id.values())

    def get(self, ontology_id: str) -> Ontology:
        try:
            return self._by_id[ontology_id]
        except KeyError:
            raise UnknownConceptError(f"ontology {ontology_id!r} is not loaded") from None

    def resolve(self, ref: ConceptRef) -> Ontology:
        ontology = self.get(ref.ontology)
        if ref.name not in ontology:
            raise UnknownConceptError(f"unknown concept {ref.name!r} in ontology {ref.ontology!r}")
        return ontology

    def match(self, n: ConceptRef, m: ConceptRef) -> MatchValue:
        if n.ontology != m.ontology:
            self.resolve(n)
            self.resolve(m)
            return MatchValue.FAIL
        return self.get(n.ontology).match(n.name, m.name)

    def distance(self, n: ConceptRef, m: ConceptRef, table: DistanceTable = DEFAULT_DISTANCES) -> float:
        return table.of(self.match(n, m))


OntologyContext = Union[Ontology, OntologyStore]


def as_store(context: OntologyContext) -> OntologyStore:
    """Accept a single ontology wherever a store is expected."""
    if isinstance(context, OntologyStore):
        return context
    return OntologyStore([context])


def load_ontology(source: Union[str, Path, Mapping]) -> Ontology:
    """Load an ontology document.

    The document is JSON with fields `id`, `concepts` (list of names),
    `subsumption` (list of [parent, child] pairs) and optional `equivalences`
    (list of [a, b] pairs). A dict, a JSON string or a file path is accepted.
    """
    doc = _read_document(source, kind="ontology")
    for field in ("id", "concepts"):
        if field not in doc:
            raise OntologyError(f"ontology document missing field {field!r}")
    if not isinstance(doc["concepts"], list):
        raise OntologyError("ontology field 'concepts' must be a list of names")
    pairs = doc.get("subsumption", [])
    links = doc.get("equivalences", [])
    for name, seq in (("subsumption", pairs), ("equivalences", links)):
        if not isinstance(seq, list) or any(not isinstance(e, (list, tuple)) or len(e) != 2 for e in seq):
            raise OntologyError(f"ontology field {name!r} must be a list of [a, b] pairs")
    return Ontology(
        id=str(doc["id"]),
        concepts=[str(c) for c in doc["concepts"]],
        subsumption=[(str(a), str(b)) for a, b in pairs],
        equivalences=[(str(a), str(b)) for a, b in links],
    )


def _read_document(source: Union[str, Path, Mapping], kind: str) -> Mapping:
    if isinstance(source, Mapping):
        return source
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OntologyError(f"malformed {kind} document: {exc}") from exc
    if not isinstance(doc, dict):
        raise OntologyError(f"{kind} document must be a JSON object")
    return doc


def match_concepts(context: OntologyContext, n: ConceptRef, m: ConceptRef) -> MatchValue:
    """Concept-level match via a store or a single ontology."""
    return as_store(context).match(n, m)


def concept_distance(
    context: OntologyContext,
    n: ConceptRef,
    m: ConceptRef,
    table: DistanceTable = DEFAULT_DISTANCES,
) -> float:
    return as_store(context).distance(n, m, table)
