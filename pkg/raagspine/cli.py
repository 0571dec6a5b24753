"""
Command-line entry point for raagspine.

Usage:
    python -m raagspine analyze --graph fixture:EX1
    python -m raagspine rank --graph fixture:FORK --set L --witness
    python -m raagspine commute --graph fixture:EDGELESS(2) \\
        --first "{a b | a^-1 b^-1 | }@a" --second "{b a | b^-1 a^-1 | }@b"
    python -m raagspine spine --graph fixture:SIMPLETREE --collapse
    python -m raagspine verify --suite quick --json

Exit codes: 0 success, 1 a computed property failed or the input was
rejected, 2 usage error.
"""

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from hydra.errors import HydraException
from loguru import logger

from raagspine.config import get_config, load_config, pick, set_config
from raagspine.errors import PartitionError, RaagSpineError
from raagspine.fixtures import load_fixture
from raagspine.graph_core import (
    SimplicialGraph,
    components_outside_link,
    format_graph,
    graph_automorphisms,
    inseparable_sets,
    is_barbed,
    parse_graph,
    relations,
)
from raagspine.partitions import Mode, enumerate_partitions, format_partition, parse_partition
from raagspine.rank_search import (
    build_abelian_generators,
    condition_holds,
    easy_condition_holds,
    m_single_closed_form,
    max_compatible,
    resolve_base_set,
    verify_abelian_rank,
)
from raagspine.spine import SPINE_MODE, build_star, collapse_is_equivariant, collapse_pass, cube_census, to_dot
from raagspine.verify import SUITES, run_suite, summary
from raagspine.whitehead import (
    WhiteheadAuto,
    compose,
    format_auto,
    format_map,
    invert,
    outer_commute_oracle,
    outer_commute_predicate,
    to_generator_map,
)


# ------------------------------
# Report
# ------------------------------
@dataclass
class Report:
    command: str
    graph: Optional[str] = None
    graph_hash: Optional[str] = None
    parameters: Dict[str, Any] = field(default_factory=dict)
    results: Dict[str, Any] = field(default_factory=dict)
    elapsed: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "command": self.command,
            "graph": self.graph,
            "graph_hash": self.graph_hash,
            "parameters": self.parameters,
            "results": self.results,
        }
        if self.elapsed is not None:
            out["elapsed"] = round(self.elapsed, 3)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        data = json.loads(text)
        return cls(
            data["command"], data.get("graph"), data.get("graph_hash"),
            data.get("parameters", {}), data.get("results", {}), data.get("elapsed"),
        )


def graph_hash(g: SimplicialGraph) -> str:
    return hashlib.sha256(format_graph(g).encode("utf-8")).hexdigest()[:16]


def load_graph(spec: str) -> SimplicialGraph:
    """
    Resolve ``file:PATH`` or ``fixture:NAME``.

    Raises:
        RaagSpineError: unknown scheme, missing file or bad graph text
    """
    scheme, _, rest = spec.partition(":")
    if scheme == "fixture" and rest:
        return load_fixture(rest)
    if scheme == "file" and rest:
        path = Path(rest)
        if not path.is_file():
            raise RaagSpineError(f"graph file not found: {path}")
        return parse_graph(path.read_text(encoding="utf-8"))
    raise RaagSpineError(f"graph must be given as file:PATH or fixture:NAME, got '{spec}'")


def parse_auto(g: SimplicialGraph, text: str) -> WhiteheadAuto:
    """``{side | side | link}@letter``"""
    body, sep, letter = text.rpartition("@")
    if not sep:
        raise PartitionError(f"automorphism '{text}' needs a multiplier after '@'")
    return WhiteheadAuto(parse_partition(g, body), g.letter(letter))


# ------------------------------
# Commands
# ------------------------------
CommandResult = Tuple[Dict[str, Any], List[str], bool]


def cmd_analyze(g: SimplicialGraph, args: argparse.Namespace) -> CommandResult:
    rel = relations(g)
    names = g.vertices
    classes = [
        {"members": [names[v] for v in cls.members], "abelian": cls.abelian}
        for cls in rel.classes
    ]
    per_vertex = {}
    for v, name in enumerate(names):
        per_vertex[name] = {
            "link": g.sorted_names(g.link_mask(v)),
            "below": [names[w] for w in range(g.n) if rel.lt_circ(v, w)],
            "components": [g.sorted_names(c) for c in components_outside_link(g, v)],
            "inseparable": [g.format_letters(s) for s in inseparable_sets(g, name)],
            "m_value": max_compatible(g, 1 << v).m_value,
            "closed_form": m_single_closed_form(g, name),
        }
    barbed = is_barbed(g)
    condition = condition_holds(g)
    easy = easy_condition_holds(g)
    results = {
        "vertices": list(names),
        "edges": [[names[i], names[j]] for i, j in g.edges()],
        "classes": classes,
        "principal": g.sorted_names(rel.principal_mask),
        "maximal": sorted(names[v] for v in rel.maximal),
        "per_vertex": per_vertex,
        "barbed": {"holds": barbed.holds, "witness": barbed.witness},
        "condition": {"holds": condition.holds, "witness": condition.witness},
        "easy_condition": {"holds": easy.holds, "witness": easy.witness},
        "automorphisms": len(graph_automorphisms(g)),
    }

    lines = [f"{g.n} vertices, {len(results['edges'])} edges"]
    lines.append("classes: " + "  ".join(
        "[" + " ".join(c["members"]) + "]" + ("" if c["abelian"] else "*") for c in classes
    ))
    lines.append(f"principal: {' '.join(results['principal'])}")
    lines.append(f"maximal: {' '.join(results['maximal'])}")
    for name, info in per_vertex.items():
        blocks = " ".join("{" + s + "}" for s in info["inseparable"])
        lines.append(f"  {name}: lk = {{{' '.join(info['link'])}}}  I = {blocks}  M = {info['m_value']}")
    lines.append(f"barbed: {barbed.holds}" + (f" (witness {barbed.witness})" if barbed.witness else ""))
    lines.append(f"condition: {condition.holds}" + (f" (witness {condition.witness})" if condition.witness else ""))
    lines.append(f"easy condition: {easy.holds}" + (f" (witness {easy.witness})" if easy.witness else ""))
    lines.append(f"graph automorphisms: {results['automorphisms']}")
    return results, lines, True


def cmd_partitions(g: SimplicialGraph, args: argparse.Namespace) -> CommandResult:
    mask = resolve_base_set(g, args.base)
    parts = enumerate_partitions(g, g.sorted_names(mask))
    listed = [
        {"partition": format_partition(g, p), "bases": g.format_letters(p.bases)}
        for p in parts
    ]
    lines = [f"{len(parts)} partitions based in {{{' '.join(g.sorted_names(mask))}}}"]
    lines.extend(f"  {entry['partition']}  bases: {entry['bases']}" for entry in listed)
    return {"count": len(parts), "partitions": listed}, lines, True


def cmd_rank(g: SimplicialGraph, args: argparse.Namespace) -> CommandResult:
    mode = Mode(args.mode)
    report = max_compatible(g, args.set, mode)
    lower = max_compatible(g, "L", mode).m_value
    upper = max_compatible(g, "V", mode).m_value
    witness = [format_partition(g, p) for p in report.witness]
    results = {
        "set": list(report.base_set),
        "mode": mode.value,
        "value": report.m_value,
        "witness": witness,
        "vcd_lower": lower,
        "vcd_upper": upper,
    }
    lines = [f"M({','.join(report.base_set)}) = {report.m_value} ({mode.value})",
             f"vcd bounds: [{lower}, {upper}]"]
    if args.witness:
        lines.extend(f"  {p}" for p in witness)
    return results, lines, True


def cmd_abelian(g: SimplicialGraph, args: argparse.Namespace) -> CommandResult:
    autos = build_abelian_generators(g)
    verdict = verify_abelian_rank(g, autos, args.exponent_bound, args.bound)
    results = {
        "rank": len(autos),
        "generators": [format_auto(g, a) for a in autos],
        "passed": verdict.passed,
        "reason": verdict.reason,
        "pair": list(verdict.pair) if verdict.pair else None,
        "vector": list(verdict.vector) if verdict.vector else None,
    }
    lines = [f"{len(autos)} commuting generators"]
    lines.extend(f"  {a}" for a in results["generators"])
    lines.append("independent up to the exponent bound" if verdict.passed else f"FAILED: {verdict.reason}")
    return results, lines, verdict.passed


def cmd_commute(g: SimplicialGraph, args: argparse.Namespace) -> CommandResult:
    a1, a2 = parse_auto(g, args.first), parse_auto(g, args.second)
    predicate = outer_commute_predicate(g, a1, a2)
    oracle = outer_commute_oracle(g, a1, a2, args.bound)
    unknown = oracle is None
    agree = not unknown and oracle == predicate
    results = {
        "first": format_auto(g, a1),
        "second": format_auto(g, a2),
        "predicate": predicate,
        "oracle": "unknown" if oracle is None else oracle,
        "agree": agree,
        "unknown": unknown,
    }
    lines = [f"{results['first']}", f"{results['second']}",
             f"predicate: {predicate}", f"oracle: {results['oracle']}"]
    if unknown:
        lines.append(f"UNKNOWN: innerness undecided within bound {pick(args.bound, 'whitehead.oracle_bound')}")
    elif not agree:
        f1, f2 = to_generator_map(g, a1), to_generator_map(g, a2)
        i1, i2 = to_generator_map(g, invert(g, a1)), to_generator_map(g, invert(g, a2))
        transcript = {
            "first": format_map(g, f1),
            "second": format_map(g, f2),
            "first_then_second": format_map(g, compose(g, f2, f1)),
            "second_then_first": format_map(g, compose(g, f1, f2)),
            "commutator": format_map(g, compose(g, compose(g, f1, f2), compose(g, i1, i2))),
        }
        results["transcript"] = transcript
        lines.append("DISAGREEMENT")
        for key, images in transcript.items():
            lines.append(f"  {key}:")
            lines.extend(f"    {image}" for image in images)
    return results, lines, agree


def cmd_spine(g: SimplicialGraph, args: argparse.Namespace) -> CommandResult:
    results: Dict[str, Any] = {}
    lines: List[str] = []
    census_wanted = args.census or not (args.collapse or args.dot)
    star = build_star(g, SPINE_MODE)
    if census_wanted:
        census = cube_census(star)
        results["census"] = {
            "counts": list(census.counts),
            "collections": census.vertices,
            "cover_edges": census.edges,
            "partitions": len(star.partitions),
            "top_dimension": star.top_dimension,
        }
        lines.append(f"{len(star.partitions)} partitions, {census.vertices} collections, dimension {star.top_dimension}")
        lines.extend(f"  {k}-cubes: {count}" for k, count in enumerate(census.counts))
    ok = True
    if args.collapse:
        report = collapse_pass(g)
        equivariant = collapse_is_equivariant(g, report)
        results["collapse"] = {
            "top_dimension": report.top_dimension,
            "residual_dimension": report.residual_dimension,
            "removed_pairs": len(report.removed_pairs),
            "orbits": report.orbit_count,
            "equivariant_choice": report.equivariant_choice,
            "equivariant": equivariant,
            "free_partitions": sorted({format_partition(g, report.star.partitions[q]) for q in report.free_partitions}),
        }
        lines.append(f"collapsed {len(report.removed_pairs)} top cubes in {report.orbit_count} orbits")
        lines.append(f"dimension {report.top_dimension} -> {report.residual_dimension}")
        lines.append(f"equivariant: {equivariant}")
        ok = report.residual_dimension < report.top_dimension
    if args.dot:
        dot = to_dot(g, star)
        results["dot"] = dot
        lines.append(dot)
    return results, lines, ok


COMMAND_TABLE: Dict[str, Callable[[SimplicialGraph, argparse.Namespace], CommandResult]] = {
    "analyze": cmd_analyze,
    "partitions": cmd_partitions,
    "rank": cmd_rank,
    "abelian": cmd_abelian,
    "commute": cmd_commute,
    "spine": cmd_spine,
}


def run_verify(args: argparse.Namespace) -> CommandResult:
    results = run_suite(args.suite, args.seed, progress=not args.json)
    counts = summary(results)
    listed = [
        {"name": r.name, "anchor": r.anchor, "passed": r.passed, "detail": r.detail}
        for r in results
    ]
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name}  [{r.anchor}]  {r.detail}" for r in results]
    lines.append(f"{counts['passed']}/{counts['total']} checks passed")
    return {"checks": listed, **counts}, lines, counts["failed"] == 0


# ------------------------------
# Argument parsing
# ------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Write a JSON report to stdout")
    common.add_argument("--timing", action="store_true", help="Include elapsed seconds in the report")
    common.add_argument("--seed", type=int, default=None, help="Random-graph seed")
    common.add_argument("--bound", type=int, default=None, help="Conjugator length bound for innerness")
    common.add_argument("--budget", type=int, default=None, help="Search node and collection budget")
    common.add_argument("--set-config", nargs="*", default=[], metavar="KEY=VALUE", help="Extra config overrides")

    with_graph = argparse.ArgumentParser(add_help=False, parents=[common])
    with_graph.add_argument("--graph", required=True, help="file:PATH or fixture:NAME")

    parser = argparse.ArgumentParser(prog="raagspine", description="Untwisted automorphisms of right-angled Artin groups")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", parents=[with_graph], help="Vertex relations, classes and inseparable sets")

    p = sub.add_parser("partitions", parents=[with_graph], help="List Gamma-Whitehead partitions")
    p.add_argument("--base", default="V", help="V, L or a comma-separated vertex list")

    p = sub.add_parser("rank", parents=[with_graph], help="Maximum compatible collection size")
    p.add_argument("--set", default="V", help="V, L or a comma-separated vertex list")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.STRONG.value)
    p.add_argument("--witness", action="store_true", help="Print the witness collection")

    p = sub.add_parser("abelian", parents=[with_graph], help="Free abelian subgroup of rank M(L)")
    p.add_argument("--exponent-bound", type=int, default=None)

    p = sub.add_parser("commute", parents=[with_graph], help="Compare the commutation criterion with brute force")
    p.add_argument("--first", required=True, help="PARTITION@LETTER")
    p.add_argument("--second", required=True, help="PARTITION@LETTER")

    p = sub.add_parser("spine", parents=[with_graph], help="Star of the spine and its collapse")
    p.add_argument("--census", action="store_true")
    p.add_argument("--collapse", action="store_true")
    p.add_argument("--dot", action="store_true")

    p = sub.add_parser("verify", parents=[common], help="Run the verification checks")
    p.add_argument("--suite", choices=SUITES, default="full")
    return parser


def config_overrides(args: argparse.Namespace) -> List[str]:
    overrides = list(args.set_config or [])
    if args.bound is not None:
        overrides.append(f"whitehead.oracle_bound={args.bound}")
    if args.budget is not None:
        overrides.append(f"search.node_budget={args.budget}")
        overrides.append(f"search.star_budget={args.budget}")
    if args.seed is not None:
        overrides.append(f"verify.seed={args.seed}")
    return overrides


def configure_logging() -> None:
    cfg = get_config()
    logger.remove()
    logger.add(sys.stderr, level=cfg.logging.level)
    logger.add(cfg.logging.file, level="INFO")


def _parameters(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {"command", "graph", "json", "timing", "set_config"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        set_config(load_config(config_overrides(args)))
    except HydraException as e:
        logger.error(f"Error loading configuration: {e}")
        print(f"error: bad configuration override: {e}", file=sys.stderr)
        return 2
    configure_logging()
    start = time.perf_counter()
    report = Report(args.command, parameters=_parameters(args))
    try:
        if args.command == "verify":
            results, lines, ok = run_verify(args)
        else:
            g = load_graph(args.graph)
            report.graph, report.graph_hash = args.graph, graph_hash(g)
            results, lines, ok = COMMAND_TABLE[args.command](g, args)
    except RaagSpineError as e:
        logger.error(f"Error running {args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1
    finally:
        set_config(None)

    report.results = results
    if args.timing:
        report.elapsed = time.perf_counter() - start
    if args.json:
        print(report.to_json())
    else:
        print("\n".join(lines))
        if report.elapsed is not None:
            print(f"elapsed: {report.elapsed:.3f}s")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
