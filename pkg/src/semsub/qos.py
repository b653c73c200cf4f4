"""QoS similarity: z-scores, direction-aware normalization and equivalence degrees.

Quantitative properties are standardized against the population of values
that the current decision compares (candidate operations plus, when present,
the application's reference values). The z-score is mapped into [0, 1] by a
direction-aware ramp: for '<' operators smaller is better and the map is
increasing, for '>' operators it is decreasing, saturating outside two
standard deviations. The per-property degree of two offers is the absolute
difference of their normalized scores; qualitative properties use the concept
distance of the candidate's concept against the reference's concept. A lower
degree means closer QoS.

Everything here is pure and stateless; populations are built per decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

from .model import Operation, QualitativeNfp, QuantitativeNfp, Service
from .ontology import DEFAULT_DISTANCES, DistanceTable, OntologyContext, as_store


class QosError(ValueError):
    """Inconsistent populations, operators or weight vectors."""


@dataclass(frozen=True)
class Population:
    """Observed values of one quantitative property across one decision.

    `values` holds (owner id, value) pairs; all owners must declare the same
    order operator for the property.
    """

    name: str
    operator: str
    values: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise QosError(f"population {self.name!r} must hold at least one value")
        if self.operator not in ("<", ">", "<=", ">="):
            raise QosError(f"population {self.name!r}: bad operator {self.operator!r}")

    @property
    def mean(self) -> float:
        vals = [v for _, v in self.values]
        return sum(vals) / len(vals)

    @property
    def stddev(self) -> float:
        vals = [v for _, v in self.values]
        mu = sum(vals) / len(vals)
        return math.sqrt(sum((v - mu) ** 2 for v in vals) / len(vals))


def z_score(pop: Population, value: float) -> float:
    """Standard score of `value` against the population (population stddev).

    A zero-spread population yields 0: identical offers are indistinguishable.
    """
    sigma = pop.stddev
    if sigma == 0.0:
        return 0.0
    return (value - pop.mean) / sigma


def eta(pop: Population, value: float) -> float:
    """Normalize a property value into [0, 1], direction-aware.

    '<' and '<=' mean smaller is better: the map increases with the z-score.
    '>' and '>=' mean greater is better: the map decreases. Outside z in
    [-2, 2] the map saturates at 0 or 1.
    """
    z = z_score(pop, value)
    if pop.operator in ("<", "<="):
        out = 0.0 if z < -2.0 else 1.0 if z > 2.0 else z / 4.0 + 0.5
    else:
        out = 1.0 if z < -2.0 else 0.0 if z > 2.0 else 0.5 - z / 4.0
    return min(1.0, max(0.0, out))


def qn_degree(pop: Population, v_i: float, v_j: float) -> float:
    """Degree between two quantitative offers: |eta(v_i) - eta(v_j)|."""
    return abs(eta(pop, v_i) - eta(pop, v_j))


def ql_degree(
    context: OntologyContext,
    np_i: QualitativeNfp,
    np_j: QualitativeNfp,
    table: DistanceTable = DEFAULT_DISTANCES,
) -> float:
    """Degree between two qualitative offers: concept distance np_i -> np_j."""
    if np_i.name != np_j.name:
        raise QosError(f"qualitative degree across properties {np_i.name!r} and {np_j.name!r}")
    return as_store(context).distance(np_i.semantic, np_j.semantic, table)


# -- population construction ---------------------------------------------------


def build_populations(
    entries: Iterable[tuple[str, Operation]],
    names: Optional[Sequence[str]] = None,
) -> dict[str, Population]:
    """Collect per-property populations from (owner id, operation) pairs.

    Raises when two owners declare different order operators for the same
    property name.
    """
    acc: dict[str, tuple[str, list[tuple[str, float]]]] = {}
    for owner, op in entries:
        for np in op.nfps:
            if not isinstance(np, QuantitativeNfp):
                continue
            if names is not None and np.name not in names:
                continue
            slot = acc.get(np.name)
            if slot is None:
                acc[np.name] = (np.operator, [(owner, np.value)])
            else:
                operator, vals = slot
                if operator != np.operator:
                    raise QosError(
                        f"property {np.name!r}: operator disagreement ({operator!r} vs {np.operator!r} from {owner!r})"
                    )
                vals.append((owner, np.value))
    return {name: Population(name=name, operator=op_, values=tuple(vals)) for name, (op_, vals) in acc.items()}


# -- degrees between operations and services ---------------------------------------


def _check_nfp_weights(weights: Optional[Mapping[str, float]], reference: Operation) -> dict[str, float]:
    names = [np.name for np in reference.nfps]
    if not names:
        return {}
    if weights is None:
        return {n: 1.0 / len(names) for n in names}
    extra = set(weights) - set(names)
    if extra:
        raise QosError(f"weights name unknown properties {sorted(extra)}")
    missing = set(names) - set(weights)
    if missing:
        raise QosError(f"weights missing properties {sorted(missing)}")
    if any(w < 0.0 for w in weights.values()):
        raise QosError("weights must be non-negative")
    total = sum(weights.values())
    if abs(total - 1.0) > 1e-9:
        raise QosError(f"weights must sum to 1, got {total!r}")
    return {n: float(weights[n]) for n in names}


def qos_degree(
    context: OntologyContext,
    reference: Operation,
    candidate: Operation,
    weights: Optional[Mapping[str, float]] = None,
    populations: Optional[Mapping[str, Population]] = None,
    table: DistanceTable = DEFAULT_DISTANCES,
) -> float:
    """How far the candidate's QoS sits from the reference's, in [0, 1].

    Iterates the reference operation's properties, weighted per property name
    (uniform by default, sum 1). Quantitative pairs contribute the normalized
    score difference over the decision population; qualitative pairs the
    concept distance of the candidate's concept against the reference's. A
    property the candidate does not offer contributes the maximal degree 1.
    """
    ws = _check_nfp_weights(weights, reference)
    pops = dict(populations) if populations is not None else build_populations(
        [("reference", reference), ("candidate", candidate)]
    )
    total = 0.0
    for np_ref in reference.nfps:
        w = ws[np_ref.name]
        np_cand = candidate.nfp(np_ref.name)
        if np_cand is None or type(np_cand) is not type(np_ref):
            total += w * 1.0
            continue
        if isinstance(np_ref, QuantitativeNfp):
            pop = pops.get(np_ref.name)
            if pop is None:
                raise QosError(f"no population supplied for quantitative property {np_ref.name!r}")
            if pop.operator != np_ref.operator or np_cand.operator != np_ref.operator:
                raise QosError(f"property {np_ref.name!r}: operator disagreement")
            total += w * qn_degree(pop, np_ref.value, np_cand.value)
        else:
            assert isinstance(np_cand, QualitativeNfp)
            total += w * ql_degree(context, np_cand, np_ref, table)
    return total


def service_qos_degree(
    context: OntologyContext,
    reference: Union[Service, Sequence[Operation]],
    candidate: Service,
    pairing: Optional[Sequence[tuple[int, int]]] = None,
    op_weights: Optional[Sequence[float]] = None,
    nfp_weights: Optional[Mapping[str, float]] = None,
    populations: Optional[Mapping[str, Population]] = None,
    table: DistanceTable = DEFAULT_DISTANCES,
) -> float:
    """Aggregate QoS degree of a candidate service against reference operations.

    `pairing` maps reference operation index to candidate operation index and
    defaults to positional pairing; `op_weights` weighs the reference
    operations (uniform by default). Single-operation services reduce to the
    plain operation-level degree.
    """
    ref_ops = list(reference.interface.operations) if isinstance(reference, Service) else list(reference)
    if not ref_ops:
        raise QosError("reference carries no operations")
    cand_ops = candidate.interface.operations
    if pairing is None:
        if len(ref_ops) > len(cand_ops):
            raise QosError("no pairing given and the candidate has fewer operations than the reference")
        pairing = [(i, i) for i in range(len(ref_ops))]
    if len(pairing) != len(ref_ops):
        raise QosError(f"pairing must cover all {len(ref_ops)} reference operations")

    if op_weights is None:
        ws = [1.0 / len(ref_ops)] * len(ref_ops)
    else:
        ws = [float(w) for w in op_weights]
        if len(ws) != len(ref_ops) or abs(sum(ws) - 1.0) > 1e-9 or any(w < 0 for w in ws):
            raise QosError("operation weights must be non-negative, one per reference operation, and sum to 1")

    total = 0.0
    for r, c in pairing:
        total += ws[r] * qos_degree(
            context, ref_ops[r], cand_ops[c], weights=nfp_weights, populations=populations, table=table
        )
    return total
