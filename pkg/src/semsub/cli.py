"""Command-line client for the substitution service.

Every subcommand is a thin HTTP client: by default requests run against an
in-process application instance, and --server points them at a running
deployment instead. Payloads are the plain JSON documents described in the
README (ontologies, service descriptors, profiles, traces).
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import httpx


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SystemExit(f"error: no such file: {path}")
    except json.JSONDecodeError as exc:
        raise SystemExit(f"error: {path}: {exc}")


def _scan_documents(directory: str) -> tuple[list[dict], list[dict]]:
    """Split a directory's JSON files into ontology and service documents."""
    root = Path(directory)
    if not root.is_dir():
        raise SystemExit(f"error: no such directory: {directory}")
    ontologies: list[dict] = []
    services: list[dict] = []
    for path in sorted(root.rglob("*.json")):
        doc = _load_json(str(path))
        if not isinstance(doc, dict):
            continue
        if "concepts" in doc:
            ontologies.append(doc)
        elif "interface" in doc and "id" in doc:
            services.append(doc)
    return ontologies, services


def _parse_weights(pairs: Optional[Sequence[str]]) -> Optional[dict[str, float]]:
    if not pairs:
        return None
    weights: dict[str, float] = {}
    for pair in pairs:
        if "=" not in pair:
            raise SystemExit(f"error: --weights expects name=value pairs, got {pair!r}")
        name, _, value = pair.partition("=")
        try:
            weights[name] = float(value)
        except ValueError:
            raise SystemExit(f"error: weight {pair!r} has a non-numeric value")
    total = sum(weights.values())
    if abs(total - 1.0) > 1e-9:
        raise SystemExit(f"error: weights must sum to 1, got {total}")
    return weights


class Client:
    """HTTP calls against --server, or an in-process app when none is given."""

    def __init__(self, server: Optional[str]) -> None:
        self.server = server

    async def post(self, path: str, payload: dict) -> dict:
        if self.server:
            async with httpx.AsyncClient(base_url=self.server, timeout=300.0) as client:
                response = await client.post(path, json=payload)
        else:
            from .service import create_app

            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(transport=transport, base_url="http://semsub.local",
                                         timeout=300.0) as client:
                response = await client.post(path, json=payload)
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise SystemExit(f"error: {detail}")
        return response.json()


def _post(server: Optional[str], path: str, payload: dict) -> dict:
    return asyncio.run(Client(server).post(path, payload))


# -- subcommands -------------------------------------------------------------


def _cmd_match(args: argparse.Namespace) -> int:
    ontologies = [_load_json(f) for f in args.ontology or []]
    payload = {
        "ontologies": ontologies,
        "service_a": _load_json(args.service_a),
        "service_b": _load_json(args.service_b),
    }
    result = _post(args.server, "/compute/match-interfaces", payload)
    print(result["value"])
    svc_a, svc_b = payload["service_a"], payload["service_b"]
    ops_a = svc_a["interface"]["operations"]
    ops_b = svc_b["interface"]["operations"]
    if result.get("pairing"):
        for a_idx, b_idx in result["pairing"]:
            pair = {
                "ontologies": ontologies,
                "service_a": svc_a,
                "service_b": svc_b,
                "operation_a": ops_a[a_idx]["concept"]["name"],
                "operation_b": ops_b[b_idx]["concept"]["name"],
            }
            op_result = _post(args.server, "/compute/match-operations", pair)
            print(f"  {pair['operation_a']} -> {pair['operation_b']}: {op_result['value']}"
                  f" (concept {op_result['concept']}, inputs {op_result['inputs']}, output {op_result['output']})")
    else:
        print(f"  not comparable: {len(ops_a)} vs {len(ops_b)} operations")
    for warning in result.get("warnings", []):
        print(f"  warning: {warning}", file=sys.stderr)
    return 0


def _cmd_distance(args: argparse.Namespace) -> int:
    service_a = _load_json(args.service_a)
    op_weights = None
    weights = _parse_weights(args.weights)
    if weights is not None:
        names = [op["concept"]["name"] for op in service_a["interface"]["operations"]]
        missing = set(weights) - set(names)
        if missing:
            raise SystemExit(f"error: --weights names unknown operations {sorted(missing)}")
        op_weights = [weights.get(n, 0.0) for n in names]
    payload = {
        "ontologies": [_load_json(f) for f in args.ontology or []],
        "service_a": service_a,
        "service_b": _load_json(args.service_b),
        "op_weights": op_weights,
    }
    result = _post(args.server, "/compute/interface-distance", payload)
    print(f"{result['distance']:.6g}")
    return 0


def _cmd_qos_degree(args: argparse.Namespace) -> int:
    onto_docs, population = _scan_documents(args.population)
    for f in args.ontology or []:
        onto_docs.append(_load_json(f))
    payload = {
        "ontologies": onto_docs,
        "reference": _load_json(args.service_a),
        "candidate": _load_json(args.service_b),
        "population": population,
        "weights": _parse_weights(args.weights),
    }
    result = _post(args.server, "/compute/qos-degree", payload)
    for row in result["table"]:
        if row["kind"] == "quantitative":
            print(f"  {row['property']:<12} mu={row['mean']:.4g} sigma={row['stddev']:.4g}"
                  f"  ref={row['reference_value']:g} z={row['reference_z']:+.3f} eta={row['reference_eta']:.3f}"
                  f"  cand={row['candidate_value']:g} z={row['candidate_z']:+.3f} eta={row['candidate_eta']:.3f}"
                  f"  deg={row['degree']:.3f} w={row['weight']:.3g}")
        elif row["kind"] == "qualitative":
            print(f"  {row['property']:<12} {row['candidate_concept']} -> {row['reference_concept']}"
                  f"  deg={row['degree']:.3f} w={row['weight']:.3g}")
        else:
            print(f"  {row['property']:<12} missing counterpart  deg=1 w={row['weight']:.3g}")
    print(f"degree: {result['degree']:.4f}")
    return 0


def _cmd_explain(args: argparse.Namespace) -> int:
    ontologies, services = _scan_documents(args.env)
    payload = {
        "ontologies": ontologies,
        "environment": services,
        "departed": args.service,
        "profile": _load_json(args.profile) if args.profile else None,
    }
    plan = _post(args.server, "/compute/plan", payload)
    print(f"substitution plan for {plan['service']}:")
    for tier, title in (
        ("t_equiv", "equivalent"),
        ("t_almost", "almost-equivalent"),
        ("t_subset", "operation-subset"),
        ("t_subsume", "subsume (degraded)"),
    ):
        entries = plan[tier]
        if not entries:
            print(f"  {title}: -")
            continue
        rendered = ", ".join(
            f"{e['service']} (degree {e['degree']:.4f}"
            + (f", via {'/'.join(e['subset'])}" if e.get("subset") else "") + ")"
            for e in entries
        )
        print(f"  {title}: {rendered}")
    print(f"  proxy fallback: {'engaged' if plan['proxy_fallback'] else 'not needed'}")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    payload = {
        "ontologies": [_load_json(f) for f in args.ontology or []],
        "trace": _load_json(args.trace),
        "config": None,
    }
    report = _post(args.server, "/simulate", payload)
    Path(args.report).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    decisions = report["decisions"]
    failed = [d for d in decisions if d.get("error")]
    print(f"replayed {len(decisions)} events ({len(failed)} with diagnostics) -> {args.report}")
    for app_id, binding in report["bindings"].items():
        target = binding["service"] or "(proxy)"
        print(f"  {app_id}: {target} [{binding['mode']}]")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    result = _post(args.server, "/bench", {"n": args.n, "seed": args.seed})
    print(f"{'n':>6} {'pairwise_match_ms':>18} {'plan_ms':>10}")
    for row in result:
        print(f"{row['n']:>6} {row['pairwise_match_ms']:>18.2f} {row['plan_ms']:>10.2f}")
    return 0


# -- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semsub", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--server", help="base URL of a running service (defaults to in-process)")

    p = sub.add_parser("match", help="semantic match class of two service interfaces")
    p.add_argument("service_a")
    p.add_argument("service_b")
    p.add_argument("--ontology", action="append", required=True, help="ontology document (repeatable)")
    common(p)
    p.set_defaults(func=_cmd_match)

    p = sub.add_parser("distance", help="weighted semantic distance of two service interfaces")
    p.add_argument("service_a")
    p.add_argument("service_b")
    p.add_argument("--weights", nargs="*", metavar="NAME=W", help="per-operation weights, sum 1")
    p.add_argument("--ontology", action="append", required=True)
    common(p)
    p.set_defaults(func=_cmd_distance)

    p = sub.add_parser("qos-degree", help="QoS equivalence degree with the z-score/eta table")
    p.add_argument("service_a", help="reference service descriptor")
    p.add_argument("service_b", help="candidate service descriptor")
    p.add_argument("--population", required=True, help="directory of service + ontology documents")
    p.add_argument("--weights", nargs="*", metavar="NAME=W", help="per-property weights, sum 1")
    p.add_argument("--ontology", action="append", help="extra ontology documents")
    common(p)
    p.set_defaults(func=_cmd_qos_degree)

    p = sub.add_parser("explain", help="substitution plan for a service of an environment")
    p.add_argument("service", help="service id to plan for")
    p.add_argument("--env", required=True, help="directory of service + ontology documents")
    p.add_argument("--profile", help="application profile document")
    common(p)
    p.set_defaults(func=_cmd_explain)

    p = sub.add_parser("simulate", help="replay a churn trace and write the run report")
    p.add_argument("--trace", required=True)
    p.add_argument("--ontology", action="append", required=True)
    p.add_argument("--report", required=True, help="output path for the report JSON")
    common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("bench", help="pairwise matching and planning timings")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 1
        raise


if __name__ == "__main__":
    sys.exit(main())
