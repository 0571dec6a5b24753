"""
The star of the base vertex in the spine, as a cube complex.

Cubes c(P1, P2) are indexed by pairs of compatible collections P1 <= P2
and have dimension |P2 - P1|. Compatibility in this module is always the
weak notion. For barbed graphs with M(V) > M(L) every top-dimensional cube
c(0, P) has a free face c(0, P - {Q}) for an irreplaceable Q, and
:func:`collapse_pass` removes all of them at once, choosing Q consistently
along orbits of graph automorphisms and inversions.

Usage:
    star = build_star(g)
    cube_census(star).counts          # cubes per dimension
    report = collapse_pass(g)
    report.residual_dimension
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import pydot
from loguru import logger

from raagspine.config import pick
from raagspine.errors import CollectionError, PartitionError, SearchBudgetExceeded, TheoremViolation
from raagspine.graph_core import (
    LetterSet,
    SimplicialGraph,
    Verdict,
    bit,
    graph_automorphisms,
    is_barbed,
    iter_bits,
    lowest,
    pm,
    popcount,
    relations,
    vertex_of,
)
from raagspine.partitions import (
    GWPartition,
    Mode,
    collection_sides,
    compatible,
    enumerate_partitions,
    format_partition,
    make_partition,
    relabel,
)
from raagspine.rank_search import CompatibleCollection, adjacency_masks, max_compatible

SPINE_MODE = Mode.WEAK

SignedPermutation = Tuple[Tuple[int, ...], int]


# ------------------------------
# Records
# ------------------------------
@dataclass(frozen=True)
class Cube:
    lower: CompatibleCollection
    upper: CompatibleCollection

    def __post_init__(self):
        if not set(self.lower.partitions) <= set(self.upper.partitions):
            raise CollectionError("lower collection of a cube must lie in the upper one")

    @property
    def dimension(self) -> int:
        return len(self.upper) - len(self.lower)


@dataclass(frozen=True)
class StarComplex:
    """All compatible collections as bitmasks over ``partitions``, sorted by size then mask."""

    partitions: Tuple[GWPartition, ...]
    collections: Tuple[int, ...]
    top_dimension: int
    mode: Mode = SPINE_MODE
    index: Dict[GWPartition, int] = field(default_factory=dict, compare=False, hash=False)

    def collection(self, mask: int) -> CompatibleCollection:
        return CompatibleCollection(tuple(self.partitions[i] for i in iter_bits(mask)), self.mode)

    def mask_of(self, parts: Iterable[GWPartition]) -> int:
        out = 0
        for part in parts:
            out |= 1 << self.index[part]
        return out

    def of_size(self, k: int) -> List[int]:
        return [c for c in self.collections if popcount(c) == k]

    def cover_edges(self) -> List[Tuple[int, int]]:
        """(smaller, larger) pairs differing by one partition."""
        present = set(self.collections)
        return [
            (c & ~(1 << i), c)
            for c in self.collections
            for i in iter_bits(c)
            if c & ~(1 << i) in present
        ]


@dataclass(frozen=True)
class CubeCensus:
    counts: Tuple[int, ...]
    vertices: int
    edges: int


@dataclass(frozen=True)
class CollapseReport:
    removed_pairs: Tuple[Tuple[int, int], ...]
    free_partitions: Tuple[int, ...]
    residual_dimension: int
    top_dimension: int
    star: StarComplex = field(compare=False, hash=False)
    orbit_count: int = 0
    equivariant_choice: bool = True


# ------------------------------
# Building the star
# ------------------------------
def build_star(g: SimplicialGraph, mode: Mode = SPINE_MODE, budget: Optional[int] = None) -> StarComplex:
    """
    Enumerate every compatible collection of partitions based in V.

    Args:
        g: the defining graph
        mode: compatibility notion (weak in every caller of this module)
        budget: maximum number of collections (configured default when None)

    Raises:
        SearchBudgetExceeded: more collections than the budget allows
    """
    budget = pick(budget, "search.star_budget")
    parts = tuple(enumerate_partitions(g))
    adjacency = adjacency_masks(g, parts, mode)
    collections = [0]
    queue = deque([(0, (1 << len(parts)) - 1)])
    while queue:
        mask, candidates = queue.popleft()
        while candidates:
            i = lowest(candidates)
            candidates &= ~(1 << i)
            grown = mask | (1 << i)
            collections.append(grown)
            if len(collections) > budget:
                raise SearchBudgetExceeded(f"star has more than {budget} compatible collections")
            queue.append((grown, candidates & adjacency[i]))
    collections.sort(key=lambda c: (popcount(c), c))
    top = popcount(collections[-1])
    logger.info(f"Star: {len(parts)} partitions, {len(collections)} collections, dimension {top}")
    return StarComplex(parts, tuple(collections), top, Mode(mode), {p: i for i, p in enumerate(parts)})


def cube_census(star: StarComplex) -> CubeCensus:
    """k-cubes c(P1, P2) counted as the sum over collections P2 of C(|P2|, k)."""
    counts = [0] * (star.top_dimension + 1)
    for c in star.collections:
        size = popcount(c)
        for k in range(size + 1):
            counts[k] += comb(size, k)
    return CubeCensus(tuple(counts), len(star.collections), len(star.cover_edges()))


def hasse_diagram(star: StarComplex) -> nx.DiGraph:
    graph = nx.DiGraph()
    for c in star.collections:
        graph.add_node(c, size=popcount(c))
    graph.add_edges_from(star.cover_edges())
    return graph


def to_dot(g: SimplicialGraph, star: StarComplex) -> str:
    """Hasse diagram of the collections in DOT."""
    diagram = hasse_diagram(star)
    dot = pydot.Dot("star", graph_type="digraph", rankdir="BT")
    for node, data in diagram.nodes(data=True):
        label = "; ".join(format_partition(g, star.partitions[i]) for i in iter_bits(node)) or "empty"
        dot.add_node(pydot.Node(f"c{node}", label=f'"{label}"', shape="box", rank=str(data["size"])))
    for lower, upper in diagram.edges():
        dot.add_edge(pydot.Edge(f"c{lower}", f"c{upper}"))
    return dot.to_string()


# ------------------------------
# Sandwiched and irreplaceable partitions
# ------------------------------
def is_principal_partition(g: SimplicialGraph, part: GWPartition) -> bool:
    return bool(part.base_vertices & relations(g).principal_mask)


def _nonprincipal_base(g: SimplicialGraph, part: GWPartition, side: LetterSet) -> int:
    """Base letter of a non-principal partition lying in ``side``."""
    letters = part.bases & side
    if not letters:
        raise CollectionError("side holds no base letter")
    return lowest(letters)


def _truncate(g: SimplicialGraph, side: LetterSet, m: int) -> LetterSet:
    return side & ~bit(m) & ~pm(g.link_mask(vertex_of(m)))


def is_sandwiched(g: SimplicialGraph, q: GWPartition, pi: Iterable[GWPartition]) -> Verdict:
    """
    Principal letters m in Q and n in Q* above u with Q - ({m} + lk(m)±)
    and Q* - ({n} + lk(n)±) both sides of the collection.

    Returns:
        Verdict with witness (m, n) as letter names
    """
    parts = set(pi)
    if q not in parts:
        raise CollectionError("partition is not in the collection")
    if is_principal_partition(g, q):
        raise CollectionError("sandwiching is defined for non-principal partitions only")
    rel = relations(g)
    u = vertex_of(lowest(q.bases))
    sides = collection_sides(parts)
    above = [v for v in rel.principal if rel.lt_circ(u, v)]
    above_letters = pm(sum(1 << v for v in above))

    for side in q.sides:
        other = q.opposite(side)
        flanks_m = [m for m in iter_bits(side & above_letters) if _truncate(g, side, m) in sides]
        flanks_n = [n for n in iter_bits(other & above_letters) if _truncate(g, other, n) in sides]
        if flanks_m and flanks_n:
            return Verdict(True, (g.letter_name(flanks_m[0]), g.letter_name(flanks_n[0])))
    return Verdict(False)


def replacements(g: SimplicialGraph, q: GWPartition, pi: Iterable[GWPartition]) -> List[GWPartition]:
    """Partitions other than q compatible with every member of pi - {q}."""
    rest = [p for p in pi if p != q]
    rest_set = set(rest)
    return [
        r for r in enumerate_partitions(g)
        if r != q and r not in rest_set and all(compatible(g, r, p, SPINE_MODE) for p in rest)
    ]


def is_irreplaceable(g: SimplicialGraph, q: GWPartition, pi: Iterable[GWPartition]) -> bool:
    """
    q is the only partition extending pi - {q} back to a compatible collection.

    Raises:
        CollectionError: q not in pi, or pi not of maximum size
    """
    parts = list(pi)
    if q not in parts:
        raise CollectionError("partition is not in the collection")
    top = max_compatible(g, "V", SPINE_MODE).m_value
    if len(set(parts)) != top:
        raise CollectionError(f"collection of size {len(set(parts))} is not of maximum size {top}")
    return not replacements(g, q, parts)


def innermost_nonprincipal_sides(g: SimplicialGraph, pi: Iterable[GWPartition]) -> List[Tuple[LetterSet, GWPartition]]:
    """Non-principal sides minimal under inclusion, smallest first."""
    sides = [
        (side, part)
        for part in pi if not is_principal_partition(g, part)
        for side in part.sides
    ]
    minimal = [
        (side, part) for side, part in sides
        if not any(other != side and other & side == other for other, _ in sides)
    ]
    return sorted(minimal, key=lambda entry: (popcount(entry[0]), tuple(iter_bits(entry[0]))))


def _largest_inside(sides: Iterable[LetterSet], container: LetterSet, letter: int) -> Optional[LetterSet]:
    inside = [
        s for s in sides
        if s != container and s & container == s and s >> letter & 1
    ]
    if not inside:
        return None
    return max(inside, key=lambda s: (popcount(s), -lowest(s)))


def _side_owner(parts: Iterable[GWPartition], side: LetterSet) -> GWPartition:
    return next(p for p in parts if side in p.sides)


def _principal_base_in(g: SimplicialGraph, part: GWPartition, side: LetterSet) -> Optional[int]:
    principal = relations(g).principal_mask
    for m in iter_bits(part.bases & side):
        if principal >> vertex_of(m) & 1:
            return m
    return None


def _try_side(g: SimplicialGraph, side: LetterSet, m: int, q: GWPartition, parts: Sequence[GWPartition]) -> Optional[GWPartition]:
    try:
        candidate = make_partition(g, side, m)
    except PartitionError:
        return None
    if candidate in parts or not is_principal_partition(g, candidate):
        return None
    if all(compatible(g, candidate, p, SPINE_MODE) for p in parts if p != q):
        return candidate
    return None


def principal_replacement(g: SimplicialGraph, q: GWPartition, side: LetterSet, pi: Iterable[GWPartition]) -> Optional[GWPartition]:
    """
    Principal partition replacing an innermost, non-sandwiched q.

    Follows the innermost-side argument: the largest side M of the
    collection strictly inside Q containing u is principal at some m; unless
    M is the truncation of Q at m^-1, (Q* + M) - lk(m)± works. Otherwise the
    largest side N strictly inside Q* containing u^-1 gives the replacement.

    Returns:
        The replacement, or None when the construction does not apply
    """
    parts = list(pi)
    sides = collection_sides(parts)
    u = _nonprincipal_base(g, q, side)
    other = q.opposite(side)

    inner = _largest_inside(sides, side, u)
    if inner is None:
        return None
    m = _principal_base_in(g, _side_owner(parts, inner), inner)
    if m is None:
        return None
    if inner != _truncate(g, side, m ^ 1):
        return _try_side(g, (other | inner) & ~pm(g.link_mask(vertex_of(m))), m, q, parts)

    outer = _largest_inside(sides, other, u ^ 1)
    if outer is None:
        return None
    owner = _side_owner(parts, outer)
    if owner.is_base(u ^ 1) and owner.side_of(u ^ 1) == outer:
        return _try_side(g, outer | inner, m, q, parts)
    n = _principal_base_in(g, owner, outer)
    if n is None or outer == _truncate(g, other, n ^ 1):
        return None
    return _try_side(g, (side | outer) & ~pm(g.link_mask(vertex_of(n))), n, q, parts)


def constructive_irreplaceable(g: SimplicialGraph, pi: Iterable[GWPartition]) -> Optional[GWPartition]:
    """
    Replace innermost non-sandwiched sides by principal partitions until an
    innermost side is sandwiched. That partition already belonged to pi.

    Returns:
        The irreplaceable member, or None when no innermost side admits a
        replacement before one is sandwiched
    """
    original = list(pi)
    current = list(original)
    for _ in range(2 * len(original) + 1):
        innermost = innermost_nonprincipal_sides(g, current)
        if not innermost:
            return None
        sandwiched = [q for _, q in innermost if is_sandwiched(g, q, current).holds]
        for q in sandwiched:
            if q in original and is_irreplaceable(g, q, original):
                return q
        if sandwiched:
            return None
        replaced = None
        for side, q in innermost:
            replacement = principal_replacement(g, q, side, current)
            if replacement is not None:
                replaced = (q, replacement)
                break
        if replaced is None:
            return None
        q, replacement = replaced
        logger.debug(f"Replaced {format_partition(g, q)} by {format_partition(g, replacement)}")
        current = [p for p in current if p != q] + [replacement]
    return None


def find_irreplaceable(g: SimplicialGraph, pi: Iterable[GWPartition]) -> GWPartition:
    """
    Irreplaceable non-principal member of a maximum collection.

    Runs :func:`constructive_irreplaceable` and falls back to a scan of the
    members when it does not settle.

    Raises:
        TheoremViolation: no member of pi is irreplaceable
    """
    original = list(pi)
    found = constructive_irreplaceable(g, original)
    if found is not None:
        return found
    logger.warning(f"Replacement loop did not settle on a collection of {len(original)}, scanning members directly")
    for q in sorted(original, key=lambda p: p.sort_key):
        if not is_principal_partition(g, q) and is_irreplaceable(g, q, original):
            return q
    raise TheoremViolation("maximum collection without an irreplaceable partition")



# ------------------------------
# Symmetries
# ------------------------------
def symmetry_generators(g: SimplicialGraph) -> List[SignedPermutation]:
    """Graph automorphisms (identity dropped) and single-vertex inversions, as (sigma, inverted vertex mask)."""
    identity = tuple(range(g.n))
    gens: List[SignedPermutation] = [(sigma, 0) for sigma in graph_automorphisms(g) if sigma != identity]
    gens.extend((identity, 1 << v) for v in range(g.n))
    return gens


def _index_tables(g: SimplicialGraph, star: StarComplex, gens: Sequence[SignedPermutation]) -> List[Tuple[int, ...]]:
    return [
        tuple(star.index[relabel(g, part, sigma, inversions)] for part in star.partitions)
        for sigma, inversions in gens
    ]


def _apply_table(table: Sequence[int], mask: int) -> int:
    out = 0
    for i in iter_bits(mask):
        out |= 1 << table[i]
    return out


# ------------------------------
# Collapse
# ------------------------------
def _transport(rep: int, q0: int, tables: Sequence[Sequence[int]]) -> Tuple[Dict[int, int], bool]:
    choice = {rep: q0}
    queue = deque([rep])
    consistent = True
    while queue:
        mask = queue.popleft()
        q = choice[mask]
        for table in tables:
            image, image_q = _apply_table(table, mask), table[q]
            if image not in choice:
                choice[image] = image_q
                queue.append(image)
            elif choice[image] != image_q:
                consistent = False
    return choice, consistent


def collapse_pass(g: SimplicialGraph, budget: Optional[int] = None) -> CollapseReport:
    """
    Pair every top-dimensional cube with one free face.

    Raises:
        CollectionError: the graph is not barbed or M(V) = M(L)
        TheoremViolation: some top collection has no irreplaceable partition
    """
    barbed = is_barbed(g)
    if not barbed.holds:
        raise CollectionError(f"graph is not barbed (witness {barbed.witness})")
    m_v = max_compatible(g, "V", SPINE_MODE).m_value
    m_l = max_compatible(g, "L", SPINE_MODE).m_value
    if m_v <= m_l:
        raise CollectionError(f"collapse needs M(V) > M(L), got {m_v} and {m_l}")

    star = build_star(g, SPINE_MODE, budget)
    tops = star.of_size(star.top_dimension)
    tables = _index_tables(g, star, symmetry_generators(g))

    chosen: Dict[int, int] = {}
    orbits = 0
    equivariant = True
    for rep in tops:
        if rep in chosen:
            continue
        orbits += 1
        members = [star.partitions[i] for i in iter_bits(rep)]
        first = find_irreplaceable(g, members)
        candidates = [star.index[first]] + [
            star.index[p] for p in members
            if p != first and not is_principal_partition(g, p) and is_irreplaceable(g, p, members)
        ]
        for q0 in candidates:
            assignment, consistent = _transport(rep, q0, tables)
            if consistent:
                break
        else:
            logger.warning(f"No orbit-consistent free face for top collection {rep}, using the first choice")
            assignment, _ = _transport(rep, candidates[0], tables)
            equivariant = False
        chosen.update(assignment)

    pairs = []
    for top in tops:
        q = chosen[top]
        members = [star.partitions[i] for i in iter_bits(top)]
        if not is_irreplaceable(g, star.partitions[q], members):
            raise TheoremViolation(f"transported partition {format_partition(g, star.partitions[q])} is replaceable")
        pairs.append((top & ~(1 << q), top))

    removed = {face for face, _ in pairs} | set(tops)
    residual = max((popcount(c) for c in star.collections if c not in removed), default=0)
    logger.info(f"Collapsed {len(pairs)} top cubes in {orbits} orbits, residual dimension {residual}")
    return CollapseReport(
        tuple(pairs),
        tuple(chosen[top] for top in tops),
        residual,
        star.top_dimension,
        star,
        orbits,
        equivariant,
    )


def collapse_is_equivariant(g: SimplicialGraph, report: CollapseReport) -> bool:
    """Every symmetry generator maps free-face pairs to free-face pairs."""
    pairs = set(report.removed_pairs)
    for table in _index_tables(g, report.star, symmetry_generators(g)):
        for face, top in pairs:
            if (_apply_table(table, face), _apply_table(table, top)) not in pairs:
                return False
    return True


def top_collections(star: StarComplex) -> List[CompatibleCollection]:
    return [star.collection(c) for c in star.of_size(star.top_dimension)]
