import random

import pytest

from semsub import (
    ConceptRef,
    CycleError,
    DistanceTable,
    MatchValue,
    OntologyError,
    OntologyStore,
    UnknownConceptError,
    concept_distance,
    load_ontology,
    match_concepts,
)
from _generators import random_dag


def test_document_ontology_loads(document_ont):
    assert len(document_ont) >= 6
    assert "content" in document_ont
    assert document_ont.id == "document-ont"


def test_empty_ontology_loads():
    onto = load_ontology({"id": "empty", "concepts": []})
    assert len(onto) == 0


def test_two_node_cycle_rejected():
    with pytest.raises(CycleError):
        load_ontology({"id": "x", "concepts": ["a", "b"], "subsumption": [["a", "b"], ["b", "a"]]})


def test_self_loop_rejected():
    with pytest.raises(CycleError):
        load_ontology({"id": "x", "concepts": ["a"], "subsumption": [["a", "a"]]})


def test_dangling_edge_rejected():
    with pytest.raises(OntologyError, match="ghost"):
        load_ontology({"id": "x", "concepts": ["a"], "subsumption": [["a", "ghost"]]})


def test_duplicate_concepts_rejected():
    with pytest.raises(OntologyError, match="duplicate"):
        load_ontology({"id": "x", "concepts": ["a", "a"]})


def test_malformed_document_rejected():
    with pytest.raises(OntologyError):
        load_ontology("{not json")
    with pytest.raises(OntologyError):
        load_ontology({"id": "x"})


@pytest.mark.parametrize(
    "a,b,expected",
    [
        ("content", "electronic", MatchValue.PLUGIN),
        ("document", "URL", MatchValue.PLUGIN),
        ("paper", "document", MatchValue.SUBSUME),
        ("content", "path", MatchValue.FAIL),
    ],
)
def test_concept_match_golden(document_ont, a, b, expected):
    assert document_ont.match(a, b) is expected


def test_concept_match_reflexive(document_ont):
    for name in document_ont.concepts:
        assert document_ont.match(name, name) is MatchValue.EXACT


def test_transitive_ancestry(document_ont):
    # document -> URI -> path: any ancestor counts, not only the parent
    assert document_ont.match("document", "path") is MatchValue.PLUGIN
    assert document_ont.match("path", "document") is MatchValue.SUBSUME


def test_unknown_concept_raises(document_ont):
    with pytest.raises(UnknownConceptError):
        document_ont.match("content", "hologram")


def test_cross_ontology_pair_fails(store):
    a = ConceptRef("document-ont", "content")
    b = ConceptRef("printer-ont", "printer")
    assert match_concepts(store, a, b) is MatchValue.FAIL


def test_cross_ontology_unloaded_raises(store):
    with pytest.raises(UnknownConceptError):
        match_concepts(store, ConceptRef("document-ont", "content"), ConceptRef("nope", "x"))


def test_store_rejects_duplicate_ids(document_ont):
    store = OntologyStore([document_ont])
    with pytest.raises(OntologyError):
        store.add(document_ont)


def test_equivalence_links_give_exact():
    onto = load_ontology({
        "id": "x",
        "concepts": ["URL", "URI", "path"],
        "subsumption": [["URI", "path"]],
        "equivalences": [["URL", "URI"]],
    })
    assert onto.match("URL", "URI") is MatchValue.EXACT
    # ancestry flows through the equivalence class
    assert onto.match("URL", "path") is MatchValue.PLUGIN
    assert onto.match("path", "URL") is MatchValue.SUBSUME


def test_equivalence_is_transitive():
    onto = load_ontology({
        "id": "x",
        "concepts": ["a", "b", "c"],
        "equivalences": [["a", "b"], ["b", "c"]],
    })
    assert onto.match("a", "c") is MatchValue.EXACT


def test_equivalence_conflicting_with_subsumption_rejected():
    with pytest.raises(CycleError):
        load_ontology({
            "id": "x",
            "concepts": ["a", "b"],
            "subsumption": [["a", "b"]],
            "equivalences": [["a", "b"]],
        })


@pytest.mark.parametrize(
    "a,b,expected",
    [("wifi", "wifi", 0.0), ("wireless", "wifi", 0.2), ("bluetooth", "wifi", 1.0)],
)
def test_concept_distance_golden(printer_ont, a, b, expected):
    assert printer_ont.distance(a, b) == expected


def test_concept_distance_table_override(document_ont):
    table = DistanceTable(exact=0.0, plugin=0.1, subsume=0.5, fail=0.9)
    ref = lambda n: ConceptRef("document-ont", n)
    assert concept_distance(document_ont, ref("content"), ref("electronic"), table) == 0.1
    assert concept_distance(document_ont, ref("paper"), ref("document"), table) == 0.5


def test_distance_table_validation():
    with pytest.raises(ValueError):
        DistanceTable(exact=0.3, plugin=0.2, subsume=0.8, fail=1.0)
    with pytest.raises(ValueError):
        DistanceTable(fail=1.5)


def test_distance_zero_iff_exact(document_ont):
    names = sorted(document_ont.concepts)
    for a in names:
        for b in names:
            value = document_ont.match(a, b)
            distance = document_ont.distance(a, b)
            assert (distance == 0.0) == (value is MatchValue.EXACT)
            # monotone in the match order
            assert distance == (0.0, 0.2, 0.8, 1.0)[value]


def test_roundtrip_to_dict(document_ont):
    again = load_ontology(document_ont.to_dict())
    for a in document_ont.concepts:
        for b in document_ont.concepts:
            assert again.match(a, b) is document_ont.match(a, b)


# -- randomized properties ----------------------------------------------------


def test_plugin_subsume_duality_random_dags():
    rng = random.Random(1001)
    checked = 0
    while checked < 1000:
        onto = random_dag(rng, n_nodes=9, edge_prob=0.3)
        names = sorted(onto.concepts)
        for _ in range(25):
            a, b = rng.choice(names), rng.choice(names)
            forward, backward = onto.match(a, b), onto.match(b, a)
            if forward is MatchValue.PLUGIN:
                assert backward is MatchValue.SUBSUME
            if forward is MatchValue.EXACT:
                assert backward is MatchValue.EXACT
            if forward is MatchValue.FAIL:
                assert backward is MatchValue.FAIL
            checked += 1


def test_plugin_transitive_random_dags():
    rng = random.Random(1002)
    positive = 0
    checked = 0
    while checked < 1000:
        onto = random_dag(rng, n_nodes=10, edge_prob=0.35)
        names = sorted(onto.concepts)
        plugin_pairs = [(a, b) for a in names for b in names if onto.match(a, b) is MatchValue.PLUGIN]
        tails = {}
        for a, b in plugin_pairs:
            tails.setdefault(a, []).append(b)
        composable = [(a, b) for a, b in plugin_pairs if b in tails]
        for _ in range(40):
            checked += 1
            if composable and rng.random() < 0.8:
                n, m = rng.choice(composable)  # sample along known ancestry for density
                k = rng.choice(tails[m])
            else:
                n, m, k = (rng.choice(names) for _ in range(3))
            if onto.match(n, m) is MatchValue.PLUGIN and onto.match(m, k) is MatchValue.PLUGIN:
                positive += 1
                assert onto.match(n, k) is MatchValue.PLUGIN
    assert positive > 500  # the sampling actually exercised the implication


def test_exact_reflexive_random_dags():
    rng = random.Random(1003)
    for _ in range(120):
        onto = random_dag(rng, n_nodes=8)
        for name in onto.concepts:
            assert onto.match(name, name) is MatchValue.EXACT
