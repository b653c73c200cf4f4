"""Semantic matching of operations and interfaces, and weighted semantic distances.

Two operations are comparable when their input arity and output presence
agree; a bijection then pairs the inputs. The match class of one pairing is
the worst concept-level value among concept, paired inputs and output
(Exact < PlugIn < Subsume < Fail), and the match class of the pair of
operations is the best class achievable over all pairings. Interface matching
repeats the construction one level up, with operation match classes as items.

Bijections are enumerated exhaustively up to MAX_ENUM items; above that a
minimum-cost assignment on the concept-distance matrix picks a single
pairing, which is exact for the distance but may be pessimistic for the
class on adversarial inputs.

Equivalence (two-way interchangeability) is Exact matching; almost
equivalence (one-way replaceability, first can stand in for second) is PlugIn
matching.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Callable, Optional, Sequence

from .model import Interface, Operation
from .ontology import (
    DEFAULT_DISTANCES,
    DistanceTable,
    MatchValue,
    OntologyContext,
    UnknownConceptError,
    as_store,
)

MAX_ENUM = 6

Pairing = tuple[tuple[int, int], ...]


class MatchingError(ValueError):
    """Non-comparable arguments or malformed weight vector."""


@dataclass(frozen=True)
class OperationMatch:
    """Match outcome for a pair of operations under the best pairing."""

    value: MatchValue
    pairing: Optional[Pairing]
    concept: Optional[MatchValue] = None
    output: Optional[MatchValue] = None
    inputs: tuple[MatchValue, ...] = ()
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class InterfaceMatch:
    """Match outcome for a pair of interfaces; pairing maps operation indices."""

    value: MatchValue
    pairing: Optional[Pairing]
    warnings: tuple[str, ...] = ()


# -- weights ----------------------------------------------------------------


def uniform_weights(n: int) -> tuple[float, ...]:
    if n <= 0:
        raise MatchingError("cannot build weights for zero items")
    return tuple(1.0 / n for _ in range(n))


def check_weights(weights: Sequence[float], n: int, what: str) -> tuple[float, ...]:
    ws = tuple(float(w) for w in weights)
    if len(ws) != n:
        raise MatchingError(f"{what}: expected {n} weights, got {len(ws)}")
    if any(w < 0.0 for w in ws):
        raise MatchingError(f"{what}: weights must be non-negative")
    if abs(sum(ws) - 1.0) > 1e-9:
        raise MatchingError(f"{what}: weights must sum to 1, got {sum(ws)!r}")
    return ws


# -- pairing machinery --------------------------------------------------------


def _assignment(costs: list[list[float]]) -> tuple[tuple[int, int], ...]:
    """Single minimum-cost injective mapping of rows to columns."""
    import numpy as np
    from scipy.optimize import linear_sum_assignment

    rows, cols = linear_sum_assignment(np.asarray(costs, dtype=float))
    return tuple(zip(rows.tolist(), cols.tolist()))


def _best_injective(
    n_rows: int,
    n_cols: int,
    class_at: Callable[[int, int], MatchValue],
    cost_at: Callable[[int, int], float],
) -> tuple[MatchValue, Pairing, float]:
    """Best (class, pairing) over injective maps of rows into columns.

    Class of a mapping is the worst item class; the best mapping minimizes
    (class, total cost). Exhaustive up to MAX_ENUM columns, assignment above.
    """
    if n_rows == 0:
        return MatchValue.EXACT, (), 0.0
    if n_cols <= MAX_ENUM:
        candidates = (tuple(zip(range(n_rows), cols)) for cols in permutations(range(n_cols), n_rows))
    else:
        candidates = (_assignment([[cost_at(r, c) for c in range(n_cols)] for r in range(n_rows)]),)
    best: tuple[MatchValue, float, Pairing] | None = None
    for pairing in candidates:
        worst = MatchValue.EXACT
        cost = 0.0
        for r, c in pairing:
            v = class_at(r, c)
            if v > worst:
                worst = v
            cost += cost_at(r, c)
        key = (worst, cost, pairing)
        if best is None or key[:2] < best[:2]:
            best = key
        if worst is MatchValue.EXACT and cost == 0.0:
            break
    assert best is not None
    return best[0], best[2], best[1]


# -- operation matching ---------------------------------------------------------


def comparable_operations(
    op_i: Operation,
    op_j: Operation,
    context: Optional[OntologyContext] = None,
    table: DistanceTable = DEFAULT_DISTANCES,
) -> Optional[list[Pairing]]:
    """All candidate input pairings, or None when the operations are not comparable.

    Not comparable means different input arity or different output presence.
    Above MAX_ENUM inputs the enumeration is replaced by the single
    minimum-cost assignment pairing, which needs an ontology `context`.
    """
    if len(op_i.inputs) != len(op_j.inputs):
        return None
    if (op_i.output is None) != (op_j.output is None):
        return None
    n = len(op_i.inputs)
    if n == 0:
        return [()]
    if n > MAX_ENUM:
        if context is None:
            raise MatchingError(f"more than {MAX_ENUM} inputs: an ontology context is required to pick a pairing")
        store = as_store(context)
        costs = [
            [store.distance(op_i.inputs[r].semantic, op_j.inputs[c].semantic, table) for c in range(n)]
            for r in range(n)
        ]
        return [_assignment(costs)]
    return [tuple(zip(range(n), perm)) for perm in permutations(range(n))]


def _comparable(op_i: Operation, op_j: Operation) -> bool:
    return len(op_i.inputs) == len(op_j.inputs) and (op_i.output is None) == (op_j.output is None)


def _concept_match(
    context: OntologyContext, a, b, warnings: list[str]
) -> MatchValue:
    try:
        return as_store(context).match(a, b)
    except UnknownConceptError as exc:
        warnings.append(str(exc))
        return MatchValue.FAIL


def match_operations(
    context: OntologyContext,
    op_i: Operation,
    op_j: Operation,
    table: DistanceTable = DEFAULT_DISTANCES,
) -> OperationMatch:
    """Semantic match of two operations over the best input pairing.

    Unresolvable concept references count as Fail and are reported in
    `warnings` rather than raised.
    """
    if not _comparable(op_i, op_j):
        return OperationMatch(value=MatchValue.FAIL, pairing=None)

    warnings: list[str] = []
    concept = _concept_match(context, op_i.concept.semantic, op_j.concept.semantic, warnings)
    if op_i.output is None:
        output = MatchValue.EXACT  # both absent: the output slot agrees trivially
    else:
        output = _concept_match(context, op_i.output.semantic, op_j.output.semantic, warnings)

    n = len(op_i.inputs)
    cell: dict[tuple[int, int], MatchValue] = {}

    def class_at(r: int, c: int) -> MatchValue:
        key = (r, c)
        if key not in cell:
            cell[key] = _concept_match(context, op_i.inputs[r].semantic, op_j.inputs[c].semantic, warnings)
        return cell[key]

    def cost_at(r: int, c: int) -> float:
        return table.of(class_at(r, c))

    fixed = max(concept, output)
    best_class, pairing, _ = _best_injective(n, n, class_at, cost_at)
    value = max(fixed, best_class)
    return OperationMatch(
        value=value,
        pairing=pairing,
        concept=concept,
        output=output,
        inputs=tuple(class_at(r, c) for r, c in pairing),
        warnings=tuple(warnings),
    )


def equivalent_operations(context: OntologyContext, op_i: Operation, op_j: Operation) -> bool:
    return match_operations(context, op_i, op_j).value is MatchValue.EXACT


def almost_equivalent_operations(context: OntologyContext, op_i: Operation, op_j: Operation) -> bool:
    return match_operations(context, op_i, op_j).value is MatchValue.PLUGIN


# -- operation distance ----------------------------------------------------------


def operation_distance(
    context: OntologyContext,
    op_i: Operation,
    op_j: Operation,
    weights: Optional[Sequence[float]] = None,
    table: DistanceTable = DEFAULT_DISTANCES,
    pairing: Optional[Pairing] = None,
) -> float:
    """Weighted concept-distance between two comparable operations.

    Weights are ordered (concept, inputs..., output) and must sum to 1; the
    result stays in [0, 1]. Uniform weights are applied when none are given.
    The input pairing defaults to the one chosen by `match_operations`.
    """
    if not _comparable(op_i, op_j):
        raise MatchingError("operations are not comparable (input arity or output presence differ)")
    n_items = 2 + len(op_i.inputs)
    ws = uniform_weights(n_items) if weights is None else check_weights(weights, n_items, "operation weights")
    if pairing is None:
        pairing = match_operations(context, op_i, op_j, table).pairing or ()

    store = as_store(context)
    total = ws[0] * store.distance(op_i.concept.semantic, op_j.concept.semantic, table)
    for r, c in pairing:
        total += ws[1 + r] * store.distance(op_i.inputs[r].semantic, op_j.inputs[c].semantic, table)
    if op_i.output is not None and op_j.output is not None:
        total += ws[-1] * store.distance(op_i.output.semantic, op_j.output.semantic, table)
    return total


# -- interface matching ------------------------------------------------------------


def _operation_matrix(
    context: OntologyContext,
    ops_i: Sequence[Operation],
    ops_j: Sequence[Operation],
    table: DistanceTable,
) -> tuple[Callable[[int, int], MatchValue], Callable[[int, int], float], list[str]]:
    """Lazy pairwise operation match/distance lookups with shared caching."""
    warnings: list[str] = []
    matches: dict[tuple[int, int], OperationMatch] = {}

    def match_at(r: int, c: int) -> OperationMatch:
        key = (r, c)
        if key not in matches:
            m = match_operations(context, ops_i[r], ops_j[c], table)
            matches[key] = m
            warnings.extend(m.warnings)
        return matches[key]

    def class_at(r: int, c: int) -> MatchValue:
        return match_at(r, c).value

    def cost_at(r: int, c: int) -> float:
        m = match_at(r, c)
        if m.pairing is None:
            return table.of(MatchValue.FAIL) * (2 + len(ops_i[r].inputs))
        return operation_distance(context, ops_i[r], ops_j[c], table=table, pairing=m.pairing)

    return class_at, cost_at, warnings


def match_interfaces(
    context: OntologyContext,
    ifc_i: Interface,
    ifc_j: Interface,
    table: DistanceTable = DEFAULT_DISTANCES,
) -> InterfaceMatch:
    """Semantic match of two interfaces over the best operation bijection.

    Interfaces with different operation counts fail outright; they remain
    candidates for subset matching via `match_interfaces_over`.
    """
    if len(ifc_i) != len(ifc_j):
        return InterfaceMatch(value=MatchValue.FAIL, pairing=None)
    class_at, cost_at, warnings = _operation_matrix(context, ifc_i.operations, ifc_j.operations, table)
    value, pairing, _ = _best_injective(len(ifc_i), len(ifc_j), class_at, cost_at)
    return InterfaceMatch(value=value, pairing=pairing, warnings=tuple(warnings))


def match_interfaces_over(
    context: OntologyContext,
    ifc_i: Interface,
    ifc_j: Interface,
    subset: Sequence[str],
    table: DistanceTable = DEFAULT_DISTANCES,
) -> InterfaceMatch:
    """Semantic match quantified over a subset of ifc_i's operations.

    Each named operation of ifc_i is injectively paired with some operation
    of ifc_j; classification follows the full-interface rules restricted to
    those pairs. The returned pairing maps ifc_i operation indices to ifc_j
    operation indices.
    """
    names = [op.name for op in ifc_i.operations]
    indices: list[int] = []
    for name in subset:
        if name not in names:
            raise MatchingError(f"subset names unknown operation {name!r}")
        indices.append(names.index(name))
    if len(set(indices)) != len(indices):
        raise MatchingError("subset repeats an operation name")
    if len(indices) > len(ifc_j):
        return InterfaceMatch(value=MatchValue.FAIL, pairing=None)

    rows = [ifc_i.operations[i] for i in indices]
    class_at, cost_at, warnings = _operation_matrix(context, rows, ifc_j.operations, table)
    value, pairing, _ = _best_injective(len(rows), len(ifc_j), class_at, cost_at)
    remapped = tuple((indices[r], c) for r, c in pairing)
    return InterfaceMatch(value=value, pairing=remapped, warnings=tuple(warnings))


def equivalent_interfaces(context: OntologyContext, ifc_i: Interface, ifc_j: Interface) -> bool:
    return match_interfaces(context, ifc_i, ifc_j).value is MatchValue.EXACT


def almost_equivalent_interfaces(context: OntologyContext, ifc_i: Interface, ifc_j: Interface) -> bool:
    return match_interfaces(context, ifc_i, ifc_j).value is MatchValue.PLUGIN


def equivalent_interfaces_over(
    context: OntologyContext, ifc_i: Interface, ifc_j: Interface, subset: Sequence[str]
) -> bool:
    return match_interfaces_over(context, ifc_i, ifc_j, subset).value is MatchValue.EXACT


def almost_equivalent_interfaces_over(
    context: OntologyContext, ifc_i: Interface, ifc_j: Interface, subset: Sequence[str]
) -> bool:
    return match_interfaces_over(context, ifc_i, ifc_j, subset).value is MatchValue.PLUGIN


def best_cover(
    context: OntologyContext,
    candidate: Interface,
    targets: Sequence[Operation],
    table: DistanceTable = DEFAULT_DISTANCES,
) -> tuple[MatchValue, Pairing]:
    """Best injective cover of target operations by a candidate's operations.

    Each target operation is paired with a distinct candidate operation and
    the item value is match(candidate op, target op), so PlugIn means the
    candidate can stand in for every target. The pairing maps target index to
    candidate operation index.
    """
    if len(targets) > len(candidate):
        return MatchValue.FAIL, ()
    class_at, cost_at, _ = _operation_matrix(context, list(candidate.operations), list(targets), table)

    def cls(r: int, c: int) -> MatchValue:
        return class_at(c, r)  # candidate first: does candidate op c replace target r

    def cost(r: int, c: int) -> float:
        return cost_at(c, r)

    value, pairing, _ = _best_injective(len(targets), len(candidate), cls, cost)
    return value, pairing


# -- interface distance ---------------------------------------------------------


def interface_distance(
    context: OntologyContext,
    ifc_i: Interface,
    ifc_j: Interface,
    op_weights: Optional[Sequence[float]] = None,
    item_weights: Optional[Sequence[Sequence[float]]] = None,
    table: DistanceTable = DEFAULT_DISTANCES,
) -> float:
    """Weighted sum of operation distances over the matched operation pairing.

    `op_weights` weighs ifc_i's operations (uniform by default) and must sum
    to 1; `item_weights`, when given, supplies one per-operation weight vector
    per operation of ifc_i.
    """
    matched = match_interfaces(context, ifc_i, ifc_j, table)
    if matched.pairing is None:
        raise MatchingError("interfaces are not comparable (different operation counts)")
    n = len(ifc_i)
    ws = uniform_weights(n) if op_weights is None else check_weights(op_weights, n, "operation weights")
    if item_weights is not None and len(item_weights) != n:
        raise MatchingError(f"expected {n} item weight vectors, got {len(item_weights)}")

    total = 0.0
    for r, c in matched.pairing:
        per_item = None if item_weights is None else item_weights[r]
        total += ws[r] * operation_distance(
            context, ifc_i.operations[r], ifc_j.operations[c], weights=per_item, table=table
        )
    return total
