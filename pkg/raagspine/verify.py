"""
Named verification checks over the fixtures and seeded random graphs.

Each check recomputes a published value or a proven identity and reports
PASS or FAIL with a short detail line. ``full`` runs every check,
``quick`` the sub-minute subset.

Usage:
    results = run_suite("quick", seed=0)
    all(r.passed for r in results)
"""

import itertools
import time
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np
from loguru import logger
from tqdm import tqdm

from raagspine.config import pick
from raagspine.errors import RaagSpineError
from raagspine.fixtures import fixture_names, load_fixture, random_graphs, random_trees
from raagspine.graph_core import SimplicialGraph, inseparable_sets, is_connected, relations
from raagspine.partitions import Mode, enumerate_partitions, format_partition, side_partition
from raagspine.rank_search import (
    build_abelian_generators,
    condition_holds,
    far_apart_pairs,
    make_collection,
    m_single_closed_form,
    max_compatible,
    verify_abelian_rank,
)
from raagspine.spine import (
    SPINE_MODE,
    build_star,
    collapse_pass,
    is_irreplaceable,
    is_principal_partition,
    is_sandwiched,
    top_collections,
)
from raagspine.whitehead import (
    WhiteheadAuto,
    compose,
    conjugation_map,
    format_auto,
    identity_map,
    invert,
    outer_commute_oracle,
    outer_commute_predicate,
    to_generator_map,
)

SUITES = ("full", "quick")


class CheckResult(NamedTuple):
    name: str
    anchor: str
    passed: bool
    detail: str
    elapsed: float


class Check(NamedTuple):
    name: str
    anchor: str
    run: Callable[[int], Tuple[bool, str]]
    quick: bool = False


def _sample(seed: int) -> List[Tuple[str, SimplicialGraph]]:
    named = [(name, load_fixture(name)) for name in fixture_names()]
    return named + random_graphs(seed)


def _autos(g: SimplicialGraph) -> List[WhiteheadAuto]:
    return [
        WhiteheadAuto(part, m)
        for part in enumerate_partitions(g)
        for m in range(2 * g.n) if part.is_base(m)
    ]


# ------------------------------
# Checks
# ------------------------------
def check_inseparable_sets(seed: int) -> Tuple[bool, str]:
    g = load_fixture("EX1")
    expected = {g.letter_set(s) for s in ("m", "m^-1", "u", "u^-1", "v1 v2 v1^-1 v2^-1")}
    found = inseparable_sets(g, "m")
    listed = ", ".join("{" + g.format_letters(s) + "}" for s in found)
    return set(found) == expected and len(found) == 5, f"I(m) = {listed}"


def check_free_group_rank(seed: int) -> Tuple[bool, str]:
    values = {n: max_compatible(load_fixture(f"EDGELESS({n})"), "V").m_value for n in range(2, 6)}
    passed = all(values[n] == 2 * n - 3 for n in values)
    return passed, ", ".join(f"n={n}: {v}" for n, v in values.items())


def check_diamonds(seed: int) -> Tuple[bool, str]:
    values = {d: max_compatible(load_fixture(f"DIAMONDS({d})"), "V").m_value for d in (2, 3)}
    passed = all(values[d] == 4 * d - 1 for d in values)
    return passed, ", ".join(f"d={d}: {v}" for d, v in values.items())


FORK_SIDES = (
    "a1 v0",
    "v0 a1 a1^-1 b1 b1^-1",
    "a2 v0 a1 a1^-1 b1 b1^-1",
    "v0^-1 a3 a3^-1 b3 b3^-1",
    "a3^-1 v0^-1",
)

SIMPLETREE_SIDES = (
    "a1 v0",
    "v0 a1 a1^-1 b1 b1^-1",
    "a2^-1 v0^-1",
)


def _listed_collection(g: SimplicialGraph, sides) -> Tuple[bool, int]:
    parts = [side_partition(g, side) for side in sides]
    collection = make_collection(parts)
    return collection.is_pairwise_compatible(g), len(collection)


def check_fork(seed: int) -> Tuple[bool, str]:
    g = load_fixture("FORK")
    m_l, m_v = max_compatible(g, "L").m_value, max_compatible(g, "V").m_value
    ok, size = _listed_collection(g, FORK_SIDES)
    passed = m_l == 8 and m_v == 10 and ok and size == 5
    return passed, f"M(L)={m_l}, M(V)={m_v}, listed collection compatible={ok} size={size}"


def check_simple_tree(seed: int) -> Tuple[bool, str]:
    g = load_fixture("SIMPLETREE")
    m_l, m_v = max_compatible(g, "L").m_value, max_compatible(g, "V").m_value
    ok, size = _listed_collection(g, SIMPLETREE_SIDES)
    m_three = max_compatible(g, "v0,a1,a2").m_value
    passed = m_v == 6 and m_l == 5 and ok and size == 3 and m_three == 3
    return passed, f"M(V)={m_v}, M(L)={m_l}, M(v0,a1,a2)={m_three}, listed compatible={ok}"


def check_commute_oracle(seed: int) -> Tuple[bool, str]:
    bound = pick(None, "whitehead.oracle_bound")
    pairs = 0
    for name in ("EDGELESS(3)", "PATH3", "EX1", "SIMPLETREE"):
        g = load_fixture(name)
        for a1, a2 in itertools.combinations_with_replacement(_autos(g), 2):
            pairs += 1
            predicate = outer_commute_predicate(g, a1, a2)
            oracle = outer_commute_oracle(g, a1, a2, bound)
            if oracle is None or predicate != oracle:
                return False, f"{name}: {format_auto(g, a1)} vs {format_auto(g, a2)} predicate={predicate} oracle={oracle}"
    return True, f"{pairs} pairs agree at bound {bound}"


def _base_sets(g: SimplicialGraph) -> List[Union[str, int]]:
    return ["V", "L"] + [1 << v for v in range(g.n)]


def check_weak_equals_strong(seed: int) -> Tuple[bool, str]:
    checked = 0
    for name, g in _sample(seed):
        for base_set in _base_sets(g):
            strong = max_compatible(g, base_set, Mode.STRONG).m_value
            weak = max_compatible(g, base_set, Mode.WEAK).m_value
            checked += 1
            if strong != weak:
                return False, f"{name}: U={base_set} strong={strong} weak={weak}"
    return True, f"{checked} base sets agree"


def _connected_sample(seed: int) -> List[Tuple[str, SimplicialGraph]]:
    named = [(name, load_fixture(name)) for name in fixture_names()]
    return [(name, g) for name, g in named if is_connected(g)] + random_graphs(seed, connected=True)


def check_far_apart(seed: int) -> Tuple[bool, str]:
    checked = 0
    for name, g in _connected_sample(seed):
        for u, v in far_apart_pairs(g):
            both = max_compatible(g, g.vertex_mask((u, v))).m_value
            apart = max_compatible(g, g.vertex_mask((u,))).m_value + max_compatible(g, g.vertex_mask((v,))).m_value
            checked += 1
            if both != apart:
                return False, f"{name}: M({u},{v})={both} but M({u})+M({v})={apart}"
    return True, f"{checked} pairs additive"


def check_condition(seed: int) -> Tuple[bool, str]:
    holds = nontrivial = gaps = 0
    for name, g in _sample(seed) + random_trees(seed):
        verdict = condition_holds(g)
        m_l, m_v = max_compatible(g, "L").m_value, max_compatible(g, "V").m_value
        if verdict.holds:
            holds += 1
            nontrivial += len(relations(g).principal) < g.n
            if m_l != m_v:
                return False, f"{name}: condition holds but M(L)={m_l}, M(V)={m_v}"
        elif m_l < m_v:
            gaps += 1
    detail = f"{holds} graphs satisfy the condition ({nontrivial} with non-principal vertices), {gaps} fail it with M(L) < M(V)"
    return nontrivial > 0 and gaps > 0, detail


def check_abelian_subgroup(seed: int) -> Tuple[bool, str]:
    details = []
    for name, rank in (("FORK", 8), ("SIMPLETREE", 5)):
        g = load_fixture(name)
        autos = build_abelian_generators(g)
        verdict = verify_abelian_rank(g, autos, exponent_bound=2, inner_bound=8)
        details.append(f"{name}: {len(autos)} generators, {verdict.reason or 'independent'}")
        if len(autos) != rank or not verdict.passed:
            return False, "; ".join(details)
    return True, "; ".join(details)


def check_whitehead_identities(seed: int, draws: int = 200) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    graphs = [(name, load_fixture(name)) for name in fixture_names()]
    pools = [(name, g, _autos(g)) for name, g in graphs]
    pools = [entry for entry in pools if entry[2]]
    for _ in range(draws):
        name, g, autos = pools[int(rng.integers(len(pools)))]
        aut = autos[int(rng.integers(len(autos)))]
        f = to_generator_map(g, aut)
        if compose(g, f, to_generator_map(g, invert(g, aut))) != identity_map(g):
            return False, f"{name}: {format_auto(g, aut)} times its inverse is not the identity"
        flipped = WhiteheadAuto(aut.partition, aut.multiplier ^ 1)
        m = aut.multiplier
        if to_generator_map(g, flipped) != compose(g, conjugation_map(g, (m,)), f):
            return False, f"{name}: {format_auto(g, flipped)} is not {format_auto(g, aut)} followed by conjugation"
    return True, f"{draws} random automorphisms"


def check_collapse(seed: int) -> Tuple[bool, str]:
    g = load_fixture("SIMPLETREE")
    star = build_star(g, SPINE_MODE)
    tops = top_collections(star)
    for collection in tops:
        members = list(collection)
        sandwiched = [
            q for q in members
            if not is_principal_partition(g, q) and is_sandwiched(g, q, members).holds
        ]
        if not sandwiched:
            return False, "top collection without a sandwiched partition"
        for q in sandwiched:
            if not is_irreplaceable(g, q, members):
                return False, f"sandwiched {format_partition(g, q)} is replaceable"
    report = collapse_pass(g)
    passed = star.top_dimension == 6 and report.residual_dimension == 5
    return passed, f"{len(tops)} top cubes of dimension {star.top_dimension}, residual dimension {report.residual_dimension}"


def check_closed_form(seed: int) -> Tuple[bool, str]:
    checked = 0
    for name in fixture_names():
        g = load_fixture(name)
        for v in g.vertices:
            closed, searched = m_single_closed_form(g, v), max_compatible(g, g.vertex_mask((v,))).m_value
            checked += 1
            if closed != searched:
                return False, f"{name}: vertex {v} closed form {closed}, search {searched}"
    return True, f"{checked} vertices agree"


CHECKS: List[Check] = [
    Check("inseparable_sets", "EX1: five m-inseparable sets", check_inseparable_sets, quick=True),
    Check("free_group_rank", "M(V) = 2n-3 on edgeless graphs", check_free_group_rank, quick=True),
    Check("diamonds", "M(V) = 4d-1 on a string of diamonds", check_diamonds),
    Check("fork", "FORK: M(L) = 8, M(V) = 10", check_fork, quick=True),
    Check("simple_tree", "SIMPLETREE: M(V) = 6, M(L) = 5", check_simple_tree, quick=True),
    Check("commute_oracle", "commutation criterion agrees with brute force", check_commute_oracle),
    Check("weak_equals_strong", "weak and strong maxima agree", check_weak_equals_strong),
    Check("far_apart", "M(u,v) = M(u) + M(v) for d(u,v) != 2 on connected graphs", check_far_apart),
    Check("condition", "condition implies M(V) = M(L); gap graphs fail it", check_condition),
    Check("abelian_subgroup", "free abelian subgroup of rank M(L)", check_abelian_subgroup),
    Check("whitehead_identities", "inverse and opposite-side identities", check_whitehead_identities, quick=True),
    Check("collapse", "SIMPLETREE collapses to dimension 5", check_collapse),
    Check("closed_form", "M(m) = |I(m)| - 3", check_closed_form, quick=True),
]


def checks_for(suite: str) -> List[Check]:
    if suite not in SUITES:
        raise RaagSpineError(f"unknown suite '{suite}', expected one of {', '.join(SUITES)}")
    return [c for c in CHECKS if suite == "full" or c.quick]


def run_check(check: Check, seed: int) -> CheckResult:
    start = time.perf_counter()
    try:
        passed, detail = check.run(seed)
    except RaagSpineError as e:
        logger.error(f"Error in check {check.name}: {e}")
        passed, detail = False, f"{type(e).__name__}: {e}"
    elapsed = time.perf_counter() - start
    logger.info(f"{check.name}: {'PASS' if passed else 'FAIL'} in {elapsed:.2f}s ({detail})")
    return CheckResult(check.name, check.anchor, passed, detail, elapsed)


def run_suite(suite: str = "full", seed: Optional[int] = None, progress: bool = True) -> List[CheckResult]:
    """
    Run every check of a suite in order.

    Args:
        suite: ``full`` or ``quick``
        seed: random-graph seed (configured default when None)
        progress: show a tqdm progress bar on stderr

    Returns:
        One result per check
    """
    seed = pick(seed, "verify.seed")
    checks = checks_for(suite)
    results = []
    for check in tqdm(checks, desc=f"verify {suite}", unit="check", disable=not progress):
        results.append(run_check(check, seed))
    return results


def summary(results: List[CheckResult]) -> Dict[str, int]:
    passed = sum(r.passed for r in results)
    return {"passed": passed, "failed": len(results) - passed, "total": len(results)}
