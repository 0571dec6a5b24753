"""
Gamma-Whitehead partitions.

A Gamma-Whitehead partition based at a letter m splits V± into two thick
sides and the link lk(m)±. The side containing m is a union of
m-inseparable sets, contains m and misses m^-1. Partitions are compared as
unordered pairs of sides; the stored orientation puts the side holding the
lowest letter code into ``side_p``.

Text form::

    {a b | a^-1 b^-1 | }        two sides, then the link (may be empty)
    {a b | a^-1 b^-1 | *}       link filled in by the parser

Usage:
    p = parse_partition(g, "{a b | a^-1 b^-1 | }")
    compatible(g, p, q, Mode.STRONG)
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from loguru import logger

from raagspine.errors import NestError, PartitionError, UnknownVertexError
from raagspine.graph_core import (
    Letter,
    LetterSet,
    SimplicialGraph,
    VertexRef,
    bit,
    inseparable_sets,
    iter_bits,
    lowest,
    make_letter,
    pm,
    popcount,
    relations,
    vertex_of,
    vertices_of,
)


class Mode(str, Enum):
    STRONG = "strong"
    WEAK = "weak"


# ------------------------------
# Partition record
# ------------------------------
@dataclass(frozen=True)
class GWPartition:
    side_p: LetterSet
    side_q: LetterSet
    link: LetterSet
    bases: LetterSet

    @property
    def sort_key(self) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        return tuple(iter_bits(self.side_p)), tuple(iter_bits(self.side_q))

    @property
    def sides(self) -> Tuple[LetterSet, LetterSet]:
        return self.side_p, self.side_q

    def is_base(self, m: Letter) -> bool:
        return bool(self.bases >> m & 1)

    def side_of(self, letter: Letter) -> LetterSet:
        """Side containing ``letter`` (0 when it lies in the link)."""
        if self.side_p >> letter & 1:
            return self.side_p
        if self.side_q >> letter & 1:
            return self.side_q
        return 0

    def opposite(self, side: LetterSet) -> LetterSet:
        return self.side_q if side == self.side_p else self.side_p

    @property
    def base_vertices(self) -> int:
        return vertices_of(self.bases)


def _sort_key(part: GWPartition):
    return part.sort_key


# ------------------------------
# Construction and validation
# ------------------------------
def _side_problem(g: SimplicialGraph, side: LetterSet, m: Letter) -> Optional[str]:
    name = g.letter_name(m)
    if side & ~g.all_letters:
        return "side uses letters outside the graph"
    if not side >> m & 1:
        return f"{name} is not on the side"
    if side >> (m ^ 1) & 1:
        return f"{g.letter_name(m ^ 1)} lies on the same side as {name}"
    link = pm(g.link_mask(vertex_of(m)))
    if side & link:
        return f"side meets lk({g.vertices[vertex_of(m)]})"
    for block in inseparable_sets(g, m):
        meet = side & block
        if meet and meet != block:
            return f"the {name}-inseparable set {{{g.format_letters(block)}}} is split"
    other = g.all_letters & ~link & ~side
    if popcount(side) < 2 or popcount(other) < 2:
        return "not thick: both sides need at least two letters"
    return None


def _max_letters(g: SimplicialGraph, side: LetterSet, lk: int) -> LetterSet:
    out = 0
    for n in iter_bits(side):
        if g.link_mask(vertex_of(n)) == lk and not side >> (n ^ 1) & 1:
            out |= bit(n)
    return out


def _assemble(g: SimplicialGraph, side: LetterSet, m: Letter) -> GWPartition:
    lk = g.link_mask(vertex_of(m))
    link = pm(lk)
    other = g.all_letters & ~link & ~side
    bases = _max_letters(g, side, lk) | _max_letters(g, other, lk)
    if lowest(side | other) != lowest(side):
        side, other = other, side
    return GWPartition(side, other, link, bases)


def make_partition(g: SimplicialGraph, side: LetterSet, m: Union[str, Letter]) -> GWPartition:
    """
    Validate ``side`` as a thick Gamma-Whitehead subset based at ``m``.

    Args:
        g: the defining graph
        side: letter mask of the side containing m
        m: base letter

    Returns:
        The partition {side | complement | lk(m)±}

    Raises:
        PartitionError: naming the first violated condition
    """
    m = g.letter(m)
    problem = _side_problem(g, side, m)
    if problem:
        raise PartitionError(f"{{{g.format_letters(side)}}} is not a partition based at {g.letter_name(m)}: {problem}")
    return _assemble(g, side, m)


def is_partition_side(g: SimplicialGraph, side: LetterSet, m: Letter) -> bool:
    return _side_problem(g, side, m) is None


# ------------------------------
# Enumeration
# ------------------------------
@functools.lru_cache(maxsize=4096)
def _enumerate(g: SimplicialGraph, vertex_mask: int) -> Tuple[GWPartition, ...]:
    found: Dict[Tuple[int, int], GWPartition] = {}
    for v in iter_bits(vertex_mask):
        m = make_letter(v)
        singles = (bit(m), bit(m ^ 1))
        blocks = [b for b in inseparable_sets(g, m) if b not in singles]
        link = pm(g.link_mask(v))
        for choice in range(1 << len(blocks)):
            side = bit(m)
            for i, block in enumerate(blocks):
                if choice >> i & 1:
                    side |= block
            other = g.all_letters & ~link & ~side
            if popcount(side) < 2 or popcount(other) < 2:
                continue
            part = _assemble(g, side, m)
            found.setdefault(part.sides, part)
    parts = tuple(sorted(found.values(), key=_sort_key))
    logger.debug(f"Enumerated {len(parts)} partitions based in {g.sorted_names(vertex_mask)}")
    return parts


def enumerate_partitions(g: SimplicialGraph, base_set: Optional[Iterable[VertexRef]] = None) -> List[GWPartition]:
    """All partitions with a base in base_set± (every vertex when None), canonically ordered."""
    mask = g.all_vertices if base_set is None else g.vertex_mask(base_set)
    return list(_enumerate(g, mask))


def partitions_based_in(g: SimplicialGraph, vertex_mask: int) -> Tuple[GWPartition, ...]:
    return _enumerate(g, vertex_mask)


# ------------------------------
# Compatibility
# ------------------------------
def _quadrants_meet(p1: GWPartition, p2: GWPartition) -> bool:
    return bool(
        p1.side_p & p2.side_p and p1.side_p & p2.side_q
        and p1.side_q & p2.side_p and p1.side_q & p2.side_q
    )


def compatible(g: SimplicialGraph, p1: GWPartition, p2: GWPartition, mode: Union[Mode, str] = Mode.STRONG) -> bool:
    """
    Compatibility of two partitions.

    Some quadrant must be empty, or the partitions have commuting bases m, n
    with st(m) != st(n) (strong) or m, n on distinct vertices (weak).
    """
    mode = Mode(mode)
    if not _quadrants_meet(p1, p2):
        return True
    vertices2 = p2.base_vertices
    for vm in iter_bits(p1.base_vertices):
        adjacent = g.link_mask(vm) & vertices2
        if not adjacent:
            continue
        if mode is Mode.WEAK:
            return True
        star = g.star_mask(vm)
        if any(g.star_mask(vn) != star for vn in iter_bits(adjacent)):
            return True
    return False


def splits(g: SimplicialGraph, part: GWPartition, v: VertexRef) -> bool:
    """Whether v and v^-1 lie on opposite sides."""
    i = g.vertex_index(v)
    a, b = make_letter(i, 1), make_letter(i, -1)
    return bool(
        (part.side_p >> a & 1 and part.side_q >> b & 1)
        or (part.side_p >> b & 1 and part.side_q >> a & 1)
    )


def m_length(g: SimplicialGraph, part: GWPartition, m: Union[str, Letter]) -> int:
    """Number of m-inseparable sets inside the side containing m."""
    m = g.letter(m)
    if not part.is_base(m):
        raise PartitionError(f"{g.letter_name(m)} is not a base of the partition")
    side = part.side_of(m)
    return sum(1 for block in inseparable_sets(g, m) if block & side == block)


def reduced_sides(g: SimplicialGraph, part: GWPartition, m: Union[str, Letter]) -> Tuple[LetterSet, LetterSet]:
    """Both sides minus st(m)±, the side containing m first."""
    m = g.letter(m)
    if not part.is_base(m):
        raise PartitionError(f"{g.letter_name(m)} is not a base of the partition")
    star = pm(g.star_mask(vertex_of(m)))
    side = part.side_of(m)
    return side & ~star, part.opposite(side) & ~star


def exchange(g: SimplicialGraph, part: GWPartition, v: Union[str, Letter], w: Union[str, Letter]) -> GWPartition:
    """
    Rebase ``part`` from v to w, valid when lk(v) lies inside st(w).

    The side containing v becomes (P - {v} - lk(w)±) + {w}.
    """
    v, w = g.letter(v), g.letter(w)
    if not part.is_base(v):
        raise PartitionError(f"{g.letter_name(v)} is not a base of the partition")
    if v == w:
        return part
    if g.link_mask(vertex_of(v)) & ~g.star_mask(vertex_of(w)):
        raise PartitionError(f"lk({g.vertices[vertex_of(v)]}) is not contained in st({g.vertices[vertex_of(w)]})")
    side = part.side_of(v)
    new_side = (side & ~bit(v) & ~pm(g.link_mask(vertex_of(w)))) | bit(w)
    return make_partition(g, new_side, w)


# ------------------------------
# Nests
# ------------------------------
def _common_class(g: SimplicialGraph, parts: Sequence[GWPartition]) -> int:
    rel = relations(g)
    for cls in rel.classes:
        if all(part.base_vertices & cls.mask for part in parts):
            return cls.mask
    raise NestError("the partitions do not share a base class")


def nest(g: SimplicialGraph, parts: Sequence[GWPartition], mode: Union[Mode, str] = Mode.STRONG) -> List[Tuple[GWPartition, LetterSet]]:
    """
    Order pairwise compatible partitions with bases in one class into a nest.

    Args:
        g: the defining graph
        parts: pairwise compatible partitions
        mode: compatibility notion used for the precondition

    Returns:
        (partition, chosen side) pairs whose reduced sides increase along the list

    Raises:
        NestError: when the precondition fails or no chain exists
    """
    if not parts:
        return []
    for i, p1 in enumerate(parts):
        for p2 in parts[i + 1:]:
            if not compatible(g, p1, p2, mode):
                raise NestError("the partitions are not pairwise compatible")
    cls_mask = _common_class(g, parts)

    options: List[List[Tuple[LetterSet, LetterSet]]] = []
    for part in parts:
        choices = []
        for m in iter_bits(part.bases & pm(cls_mask)):
            side = part.side_of(m)
            star = pm(g.star_mask(vertex_of(m)))
            for chosen in (side, part.opposite(side)):
                entry = (chosen, chosen & ~star)
                if entry not in choices:
                    choices.append(entry)
        options.append(choices)

    def extend(chain: List[Tuple[int, LetterSet]], floor: LetterSet, left: FrozenSet[int]):
        if not left:
            return chain
        candidates = sorted(
            (popcount(reduced), i, side, reduced)
            for i in left for side, reduced in options[i]
            if reduced & floor == floor
        )
        for _, i, side, reduced in candidates:
            found = extend(chain + [(i, side)], reduced, left - {i})
            if found is not None:
                return found
        return None

    chain = extend([], 0, frozenset(range(len(parts))))
    if chain is None:
        raise NestError("no choice of sides forms a chain")
    return [(parts[i], side) for i, side in chain]


# ------------------------------
# Relabelling
# ------------------------------
def signed_image(letters: LetterSet, sigma: Sequence[int], inversions: int) -> LetterSet:
    """Image of a letter set under v -> sigma(v), inverting the vertices in ``inversions``."""
    out = 0
    for letter in iter_bits(letters):
        v = letter >> 1
        sign = (letter & 1) ^ (inversions >> v & 1)
        out |= bit(2 * sigma[v] + sign)
    return out


def relabel(g: SimplicialGraph, part: GWPartition, sigma: Sequence[int], inversions: Union[int, Iterable[VertexRef]] = 0) -> GWPartition:
    """Apply a graph automorphism composed with inversions of some vertices."""
    if len(sigma) != g.n:
        raise PartitionError("permutation length does not match the graph")
    if not isinstance(inversions, int):
        inversions = g.vertex_mask(inversions)
    base = lowest(part.bases)
    image_base = lowest(signed_image(bit(base), sigma, inversions))
    image_side = signed_image(part.side_of(base), sigma, inversions)
    return make_partition(g, image_side, image_base)


def relabel_collection(g: SimplicialGraph, parts: Iterable[GWPartition], sigma: Sequence[int], inversions: Union[int, Iterable[VertexRef]] = 0) -> FrozenSet[GWPartition]:
    return frozenset(relabel(g, part, sigma, inversions) for part in parts)


# ------------------------------
# Text form
# ------------------------------
def side_partition(g: SimplicialGraph, side: Union[str, LetterSet]) -> GWPartition:
    """
    Partition determined by a single side, trying each of its letters as base.

    Raises:
        PartitionError: no letter of ``side`` is a valid base
    """
    if isinstance(side, str):
        try:
            side = g.letter_set(side)
        except UnknownVertexError as e:
            raise PartitionError(f"cannot parse side '{side}': {e}") from None
    for m in iter_bits(side):
        if is_partition_side(g, side, m):
            return _assemble(g, side, m)
    raise PartitionError(f"no base letter makes {{{g.format_letters(side)}}} a Gamma-Whitehead side")


def parse_partition(g: SimplicialGraph, text: str) -> GWPartition:
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise PartitionError(f"partition '{text}' must be wrapped in braces")
    fields = body[1:-1].split("|")
    if len(fields) not in (2, 3):
        raise PartitionError(f"partition '{text}' needs two sides and an optional link")
    try:
        side = g.letter_set(fields[0])
        other = g.letter_set(fields[1])
        link_text = fields[2].strip() if len(fields) == 3 else "*"
        link = None if link_text == "*" else g.letter_set(link_text)
    except UnknownVertexError as e:
        raise PartitionError(f"cannot parse partition '{text}': {e}") from None
    part = side_partition(g, side)
    if part.opposite(side) != other:
        raise PartitionError(f"second side of '{text}' is not the complement of the first outside lk")
    if link is not None and link != part.link:
        raise PartitionError(f"link of '{text}' should be {{{g.format_letters(part.link)}}}")
    return part


def format_partition(g: SimplicialGraph, part: GWPartition) -> str:
    return f"{{{g.format_letters(part.side_p)} | {g.format_letters(part.side_q)} | {g.format_letters(part.link)}}}"


def collection_sides(parts: Iterable[GWPartition]) -> FrozenSet[LetterSet]:
    """All sides of a collection (the set of sides of its partitions)."""
    out = set()
    for part in parts:
        out.update(part.sides)
    return frozenset(out)
