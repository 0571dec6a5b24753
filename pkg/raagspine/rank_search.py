"""
Maximum compatible collections and the abelian subgroups they generate.

M(U) is the largest size of a pairwise compatible collection of partitions
based in U±. It is computed exactly by a branch-and-bound maximum clique
search on the compatibility graph; branches are explored in canonical
partition order so the first optimum found is the lexicographically least
witness.

Usage:
    report = max_compatible(g, "L")
    print(report.m_value, [format_partition(g, p) for p in report.witness])

    autos = build_abelian_generators(g)
    verify_abelian_rank(g, autos, exponent_bound=1).passed
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from loguru import logger

from raagspine.config import pick
from raagspine.errors import CollectionError, CommutationError, SearchBudgetExceeded, TheoremViolation
from raagspine.graph_core import (
    SimplicialGraph,
    VertexClass,
    VertexRef,
    Verdict,
    components_outside_link,
    distance_table,
    inseparable_sets,
    iter_bits,
    lowest,
    pm,
    popcount,
    relations,
)
from raagspine.partitions import (
    GWPartition,
    Mode,
    collection_sides,
    compatible,
    exchange,
    partitions_based_in,
    relabel,
)
from raagspine.whitehead import (
    Innerness,
    NestDecomposition,
    WhiteheadAuto,
    cached_generator_map,
    compose_all,
    format_auto,
    is_inner,
    map_power,
    abelian_action,
    outer_commute_oracle,
    outer_commute_predicate,
    single_side_auto,
    telescope_chain,
)

BaseSet = Union[None, str, int, Iterable[VertexRef]]


# ------------------------------
# Records
# ------------------------------
@dataclass(frozen=True)
class CompatibleCollection:
    partitions: Tuple[GWPartition, ...]
    mode: Mode = Mode.STRONG

    def __len__(self) -> int:
        return len(self.partitions)

    def __iter__(self) -> Iterator[GWPartition]:
        return iter(self.partitions)

    def __contains__(self, part: GWPartition) -> bool:
        return part in self.partitions

    @property
    def sides(self):
        return collection_sides(self.partitions)

    def is_pairwise_compatible(self, g: SimplicialGraph) -> bool:
        return all(
            compatible(g, p1, p2, self.mode)
            for p1, p2 in itertools.combinations(self.partitions, 2)
        )


def make_collection(parts: Iterable[GWPartition], mode: Union[Mode, str] = Mode.STRONG) -> CompatibleCollection:
    return CompatibleCollection(tuple(sorted(set(parts), key=lambda p: p.sort_key)), Mode(mode))


class RankReport(NamedTuple):
    m_value: int
    witness: CompatibleCollection
    base_set: Tuple[str, ...]
    mode: Mode


# ------------------------------
# Base sets
# ------------------------------
def resolve_base_set(g: SimplicialGraph, base_set: BaseSet) -> int:
    """Vertex mask from None / "V" (all), "L" (principal), "a,b" or an iterable of vertices."""
    if base_set is None:
        return g.all_vertices
    if isinstance(base_set, int):
        return base_set
    if isinstance(base_set, str):
        text = base_set.strip()
        if text == "V":
            return g.all_vertices
        if text == "L":
            return relations(g).principal_mask
        return g.vertex_mask(name for name in text.replace(",", " ").split())
    return g.vertex_mask(base_set)


# ------------------------------
# Compatibility graph and clique search
# ------------------------------
def adjacency_masks(g: SimplicialGraph, parts: Sequence[GWPartition], mode: Union[Mode, str] = Mode.STRONG) -> List[int]:
    adjacency = [0] * len(parts)
    for i, j in itertools.combinations(range(len(parts)), 2):
        if compatible(g, parts[i], parts[j], mode):
            adjacency[i] |= 1 << j
            adjacency[j] |= 1 << i
    return adjacency


def compatibility_graph(g: SimplicialGraph, parts: Sequence[GWPartition], mode: Union[Mode, str] = Mode.STRONG) -> nx.Graph:
    """Nodes are indices into ``parts`` (attribute ``partition``); edges join compatible pairs."""
    graph = nx.Graph()
    for i, part in enumerate(parts):
        graph.add_node(i, partition=part)
    for i, mask in enumerate(adjacency_masks(g, parts, mode)):
        graph.add_edges_from((i, j) for j in iter_bits(mask) if j > i)
    return graph


def _colouring_ceiling(adjacency: Sequence[int]) -> int:
    graph = nx.Graph()
    graph.add_nodes_from(range(len(adjacency)))
    for i, mask in enumerate(adjacency):
        graph.add_edges_from((i, j) for j in iter_bits(mask) if j > i)
    if not adjacency:
        return 0
    colouring = nx.coloring.greedy_color(graph, strategy="smallest_last")
    return max(colouring.values()) + 1


class CliqueSearch:
    """Branch and bound maximum clique over bitset adjacency, canonical index order."""

    def __init__(self, adjacency: Sequence[int], budget: Optional[int] = None, ceiling: Optional[int] = None):
        self.adjacency = list(adjacency)
        self.budget = pick(budget, "search.node_budget")
        self.ceiling = _colouring_ceiling(self.adjacency) if ceiling is None else ceiling
        self.nodes = 0
        self.best: List[int] = []

    def run(self, candidates: Optional[int] = None) -> List[int]:
        if candidates is None:
            candidates = (1 << len(self.adjacency)) - 1
        self._expand([], candidates)
        logger.debug(f"Clique search visited {self.nodes} nodes, best size {len(self.best)}")
        return self.best

    def _colour_bound(self, candidates: int) -> int:
        colours = 0
        uncoloured = candidates
        while uncoloured:
            colours += 1
            layer = uncoloured
            while layer:
                v = lowest(layer)
                uncoloured &= ~(1 << v)
                layer &= ~self.adjacency[v] & ~(1 << v)
        return colours

    def _expand(self, clique: List[int], candidates: int) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise SearchBudgetExceeded(f"clique search exceeded the node budget of {self.budget}")
        if len(clique) > len(self.best):
            self.best = list(clique)
        if not candidates or len(self.best) >= self.ceiling:
            return
        if len(clique) + self._colour_bound(candidates) <= len(self.best):
            return
        remaining = candidates
        while remaining:
            if len(clique) + popcount(remaining) <= len(self.best) or len(self.best) >= self.ceiling:
                return
            v = lowest(remaining)
            remaining &= ~(1 << v)
            clique.append(v)
            self._expand(clique, remaining & self.adjacency[v])
            clique.pop()


# ------------------------------
# M(U)
# ------------------------------
@functools.lru_cache(maxsize=1024)
def _max_compatible(g: SimplicialGraph, vertex_mask: int, mode: Mode, budget: int) -> RankReport:
    parts = partitions_based_in(g, vertex_mask)
    best = CliqueSearch(adjacency_masks(g, parts, mode), budget).run()
    witness = CompatibleCollection(tuple(parts[i] for i in best), mode)
    names = tuple(g.sorted_names(vertex_mask))
    logger.info(f"M({','.join(names) or '{}'}) = {len(best)} over {len(parts)} partitions ({mode.value})")
    return RankReport(len(best), witness, names, mode)


def max_compatible(g: SimplicialGraph, base_set: BaseSet = None, mode: Union[Mode, str] = Mode.STRONG, budget: Optional[int] = None) -> RankReport:
    """
    Exact M(U) with a deterministic witness.

    Args:
        g: the defining graph
        base_set: vertices U (see :func:`resolve_base_set`)
        mode: strong or weak compatibility
        budget: clique search node budget (configured default when None)

    Returns:
        RankReport whose witness has m_value partitions
    """
    mask = resolve_base_set(g, base_set)
    return _max_compatible(g, mask, Mode(mode), pick(budget, "search.node_budget"))


def m_single_closed_form(g: SimplicialGraph, m: VertexRef) -> int:
    return max(len(inseparable_sets(g, 2 * g.vertex_index(m))) - 3, 0)


def vcd_bounds(g: SimplicialGraph) -> Tuple[int, int]:
    """(M(L), M(V))"""
    return max_compatible(g, "L").m_value, max_compatible(g, "V").m_value


# ------------------------------
# Conditions on the graph
# ------------------------------
def _upper_principal(g: SimplicialGraph, u: int) -> List[int]:
    rel = relations(g)
    return [m for m in range(g.n) if m in rel.principal and m in rel.maximal and rel.lt_circ(u, m)]


def condition_holds(g: SimplicialGraph) -> Verdict:
    """
    Every non-principal u has its principal maximal m with lk(u) < lk(m)
    in a single component of Gamma - lk(u). Implies M(V) = M(L).

    Returns:
        Verdict with witness (u, m1, m2) when two such m are separated
    """
    rel = relations(g)
    for u in range(g.n):
        if u in rel.principal:
            continue
        components = components_outside_link(g, u)
        first = None
        for m in _upper_principal(g, u):
            where = next(i for i, c in enumerate(components) if c >> m & 1)
            if first is None:
                first = (m, where)
            elif where != first[1]:
                return Verdict(False, (g.vertices[u], g.vertices[first[0]], g.vertices[m]))
    return Verdict(True)


def easy_condition_holds(g: SimplicialGraph) -> Verdict:
    """Every non-principal vertex lies strictly below at most one principal class."""
    rel = relations(g)
    for u in range(g.n):
        if u in rel.principal:
            continue
        seen: Dict[Tuple[int, ...], int] = {}
        for m in sorted(rel.principal):
            if rel.lt_circ(u, m):
                seen.setdefault(rel.class_of(m).members, m)
        if len(seen) > 1:
            m1, m2 = sorted(seen.values())[:2]
            return Verdict(False, (g.vertices[u], g.vertices[m1], g.vertices[m2]))
    return Verdict(True)


def far_apart_pairs(g: SimplicialGraph) -> List[Tuple[str, str]]:
    """Non-equivalent pairs at distance other than 2 (infinite included)."""
    rel = relations(g)
    table = distance_table(g)
    return [
        (g.vertices[u], g.vertices[v])
        for u, v in itertools.combinations(range(g.n), 2)
        if not rel.equivalent(u, v) and table[u][v] != 2
    ]


def missing_exchanges(g: SimplicialGraph, collection: Iterable[GWPartition]) -> List[Tuple[GWPartition, int]]:
    """(partition, w) pairs whose exchange to w in the partition's abelian class is absent."""
    rel = relations(g)
    parts = set(collection)
    missing = []
    for part in sorted(parts, key=lambda p: p.sort_key):
        for v in iter_bits(part.base_vertices):
            cls = rel.class_of(v)
            if not cls.abelian:
                continue
            m = 2 * v if part.is_base(2 * v) else 2 * v + 1
            for w in cls.members:
                if w != v and exchange(g, part, m, 2 * w | m & 1) not in parts:
                    missing.append((part, w))
    return missing


# ------------------------------
# Normalizing a non-abelian class
# ------------------------------
def _class_mask(g: SimplicialGraph, cls: Union[VertexClass, Iterable[VertexRef]]) -> int:
    if isinstance(cls, VertexClass):
        return cls.mask
    return g.vertex_mask(cls)


def normalize_class(
    g: SimplicialGraph,
    pi: CompatibleCollection,
    cls: Union[VertexClass, Iterable[VertexRef]],
    rep: VertexRef,
    base_set: BaseSet = None,
) -> CompatibleCollection:
    """
    Move every class-based partition of a maximal collection onto ``rep``.

    Each partition based at another class member s is relabelled by the
    transposition s <-> rep. When that breaks compatibility the class part
    is re-chosen by an exhaustive clique search over partitions based at
    rep that are compatible with the rest of the collection.

    Raises:
        CollectionError: pi is not maximal for its base set, or the class is
            not a principal non-abelian class containing rep
    """
    rel = relations(g)
    mask = _class_mask(g, cls)
    rep = g.vertex_index(rep)
    if not mask >> rep & 1:
        raise CollectionError(f"{g.vertices[rep]} is not in the class")
    if any(v not in rel.principal for v in iter_bits(mask)):
        raise CollectionError("class is not principal")
    if rel.class_of(rep).abelian:
        raise CollectionError("class is abelian")
    report = max_compatible(g, base_set, pi.mode)
    if len(pi) != report.m_value:
        raise CollectionError(f"collection of size {len(pi)} is not maximal (M = {report.m_value})")

    class_letters, rep_letters = pm(mask), pm(1 << rep)
    moved = [p for p in pi if p.bases & class_letters]
    keep = [p for p in pi if not p.bases & class_letters]
    if all(p.bases & rep_letters for p in moved):
        return pi

    swapped = []
    for part in moved:
        if part.bases & rep_letters:
            swapped.append(part)
            continue
        s = lowest(part.base_vertices & mask)
        sigma = list(range(g.n))
        sigma[s], sigma[rep] = rep, s
        swapped.append(relabel(g, part, sigma))
    candidate = make_collection(keep + swapped, pi.mode)
    if len(candidate) == len(pi) and candidate.is_pairwise_compatible(g):
        return candidate

    logger.info(f"Transposition replacement stalled, searching partitions based at {g.vertices[rep]}")
    pool = [p for p in partitions_based_in(g, 1 << rep) if all(compatible(g, p, k, pi.mode) for k in keep)]
    limit = pick(None, "search.normalize_fallback_limit")
    if len(pool) > limit:
        raise CollectionError(f"{len(pool)} replacement candidates exceed the fallback limit {limit}")
    best = CliqueSearch(adjacency_masks(g, pool, pi.mode), ceiling=len(moved)).run()
    if len(best) < len(moved):
        raise TheoremViolation(f"no {len(moved)} partitions based at {g.vertices[rep]} fit the collection")
    result = make_collection(keep + [pool[i] for i in best[:len(moved)]], pi.mode)
    if not result.is_pairwise_compatible(g):
        raise TheoremViolation("normalized collection is not compatible")
    return result


# ------------------------------
# Completing an abelian class
# ------------------------------
@dataclass(frozen=True)
class CompletionResult:
    completed: Tuple[WhiteheadAuto, ...]
    reduced: Tuple[WhiteheadAuto, ...]
    eliminated: Tuple[Tuple[WhiteheadAuto, NestDecomposition], ...]


def _telescope(g: SimplicialGraph, aut: WhiteheadAuto, chain_parts: Sequence[GWPartition]) -> NestDecomposition:
    n = aut.multiplier
    chain = telescope_chain(g, [p.side_of(n) for p in chain_parts], n)
    target = aut.side
    i = max(k for k, side in enumerate(chain) if side & target == side)
    j = min(k for k, side in enumerate(chain) if target & chain[k] == target)

    terms: List[Tuple[int, int]] = []   # (side, exponent)
    for ell in range(i + 2, j + 1):
        terms.append((chain[ell - 1] | (chain[ell] & target), 1))
        terms.append((chain[ell - 1], -1))
    terms.append((chain[i] | (chain[i + 1] & target), 1))

    factors: List[Tuple[WhiteheadAuto, int]] = []
    conjugations = 0
    for side, exponent in terms:
        single = single_side_auto(g, side, n)
        if single is None:
            continue
        if isinstance(single, tuple):
            conjugations += exponent
        else:
            factors.append((single, exponent))
    conjugator = ((n ^ 1,) if conjugations > 0 else (n,)) * abs(conjugations)
    return NestDecomposition(tuple(factors), conjugator)


def complete_abelian(g: SimplicialGraph, autos: Sequence[WhiteheadAuto], cls: Union[VertexClass, Iterable[VertexRef]]) -> CompletionResult:
    """
    Complete a commuting family over an abelian class, then keep a compatible class part.

    Args:
        g: the defining graph
        autos: pairwise commuting automorphisms
        cls: an abelian vertex class

    Returns:
        The completed family, the reduced family and the telescoping product
        expressing each eliminated member

    Raises:
        CommutationError: inputs not pairwise commuting
    """
    for a1, a2 in itertools.combinations(autos, 2):
        if not outer_commute_predicate(g, a1, a2):
            raise CommutationError(f"{format_auto(g, a1)} and {format_auto(g, a2)} do not commute")
    rel = relations(g)
    mask = _class_mask(g, cls)
    if not rel.class_of(lowest(mask)).abelian:
        raise CollectionError("class is not abelian")
    class_letters = pm(mask)

    completed = list(autos)
    present = {a.partition for a in autos}
    for part in partitions_based_in(g, mask):
        if part in present:
            continue
        candidate = WhiteheadAuto(part, lowest(part.bases & class_letters))
        if all(outer_commute_predicate(g, candidate, a) for a in completed):
            completed.append(candidate)
            present.add(part)
    logger.info(f"Completion added {len(completed) - len(autos)} class automorphisms")

    class_autos = [a for a in completed if a.partition.bases & class_letters]
    best = CliqueSearch(adjacency_masks(g, [a.partition for a in class_autos])).run()
    kept = [class_autos[i] for i in best]
    kept_parts = {a.partition for a in kept}

    eliminated = []
    for aut in class_autos:
        if aut.partition in kept_parts:
            continue
        chain_parts = [a.partition for a in kept if a.partition.is_base(aut.multiplier)]
        decomposition = _telescope(g, aut, chain_parts)
        for factor, _ in decomposition.factors:
            if factor.partition not in kept_parts:
                logger.debug(f"Telescoping factor {format_auto(g, factor)} is outside the kept nest")
        if decomposition.to_generator_map(g) != cached_generator_map(g, aut):
            raise TheoremViolation(f"telescoping product does not reproduce {format_auto(g, aut)}")
        eliminated.append((aut, decomposition))

    eliminated_set = {a for a, _ in eliminated}
    reduced = tuple(a for a in completed if a not in eliminated_set)
    return CompletionResult(tuple(completed), reduced, tuple(eliminated))


# ------------------------------
# The rank M(L) subgroup
# ------------------------------
def _multiplier(part: GWPartition, rel, normalized: Dict[int, int]) -> int:
    for v in iter_bits(part.base_vertices):
        cls = rel.class_of(v)
        rep = normalized.get(cls.representative)
        if rep is not None and part.bases & pm(1 << rep):
            return 2 * rep if part.is_base(2 * rep) else 2 * rep + 1
    return lowest(part.bases)


def build_abelian_generators(g: SimplicialGraph) -> List[WhiteheadAuto]:
    """M(L) pairwise commuting Whitehead automorphisms from a principal witness."""
    rel = relations(g)
    report = max_compatible(g, "L")
    pi = report.witness
    normalized: Dict[int, int] = {}
    for cls in rel.classes:
        if cls.abelian or not all(v in rel.principal for v in cls.members):
            continue
        if any(p.bases & pm(cls.mask) for p in pi):
            pi = normalize_class(g, pi, cls, cls.representative, "L")
            normalized[cls.representative] = cls.representative

    autos = [WhiteheadAuto(part, _multiplier(part, rel, normalized)) for part in pi]
    for a1, a2 in itertools.combinations(autos, 2):
        if not outer_commute_predicate(g, a1, a2):
            raise TheoremViolation(f"generators {format_auto(g, a1)} and {format_auto(g, a2)} do not commute")
    logger.info(f"Built {len(autos)} commuting generators")
    return autos


class AbelianRankVerdict(NamedTuple):
    passed: bool
    reason: str = ""
    pair: Optional[Tuple[int, int]] = None
    vector: Optional[Tuple[int, ...]] = None


def exponent_order(bound: int) -> List[int]:
    """0, 1, -1, 2, -2, ... up to +-bound"""
    order = [0]
    for e in range(1, bound + 1):
        order.extend((e, -e))
    return order


def verify_abelian_rank(
    g: SimplicialGraph,
    autos: Sequence[WhiteheadAuto],
    exponent_bound: Optional[int] = None,
    inner_bound: Optional[int] = None,
) -> AbelianRankVerdict:
    """
    Bounded certificate that ``autos`` generate a free abelian group of rank len(autos).

    Pairs must commute by the criterion and by the brute-force oracle; no
    exponent vector in [-e..e]^k other than zero may give an inner product.
    Undecided innerness counts as not inner.
    """
    exponent_bound = pick(exponent_bound, "whitehead.exponent_bound")
    inner_bound = pick(inner_bound, "whitehead.oracle_bound")

    for i, j in itertools.combinations(range(len(autos)), 2):
        if not outer_commute_predicate(g, autos[i], autos[j]):
            return AbelianRankVerdict(False, "commutation criterion fails", pair=(i, j))
        if outer_commute_oracle(g, autos[i], autos[j], inner_bound) is not True:
            return AbelianRankVerdict(False, "commutator not shown inner", pair=(i, j))

    k = len(autos)
    if k == 0:
        return AbelianRankVerdict(True)
    order = exponent_order(exponent_bound)
    maps = [{e: map_power(g, aut, e) for e in order} for aut in autos]
    matrices = [{e: abelian_action(g, f) for e, f in per_aut.items()} for per_aut in maps]
    identity = np.eye(g.n, dtype=np.int64)

    prefix = [identity] * (k + 1)
    previous: Optional[Tuple[int, ...]] = None
    for vector in itertools.product(order, repeat=k):
        start = 0
        if previous is not None:
            while vector[start] == previous[start]:
                start += 1
        for d in range(start, k):
            prefix[d + 1] = prefix[d] @ matrices[d][vector[d]]
        previous = vector
        if not any(vector) or not np.array_equal(prefix[k], identity):
            continue
        product = compose_all(g, [maps[d][e] for d, e in enumerate(vector)])
        if is_inner(g, product, inner_bound).status is Innerness.YES:
            return AbelianRankVerdict(False, "inner product of generator powers", vector=tuple(vector))
    return AbelianRankVerdict(True)
