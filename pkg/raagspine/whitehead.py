"""
Gamma-Whitehead automorphisms as maps on generators.

A :class:`WhiteheadAuto` pairs a partition with a multiplier m (a base of
the partition). With P the side containing m it sends

    v -> v m^-1        if v in P and v^-1 in P*
    v -> m v           if v^-1 in P and v in P*
    v -> m v m^-1      if v and v^-1 both lie in P
    v -> v             otherwise (m itself included)

Automorphisms are compared up to inner automorphisms with :func:`is_inner`;
no quotient structure is kept.

Usage:
    aut = WhiteheadAuto(parse_partition(g, "{a b | a^-1 b^-1 | }"), g.letter("a"))
    f = compose(g, to_generator_map(g, aut), to_generator_map(g, invert(g, aut)))
    is_inner(g, f).status   # Innerness.YES
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from raagspine.config import pick
from raagspine.errors import NestError, PartitionError, WordTooLongError
from raagspine.graph_core import (
    Letter,
    LetterSet,
    SimplicialGraph,
    VertexRef,
    bit,
    inverse_letter,
    make_letter,
    pm,
    popcount,
    vertex_of,
)
from raagspine.partitions import GWPartition, Mode, compatible, format_partition, make_partition, splits
from raagspine.raag_words import (
    Word,
    abelianization,
    coset_meet,
    cyclic_reduce,
    format_word,
    inverse_word,
    normalize,
    split_suffix,
)


# ------------------------------
# Records
# ------------------------------
@dataclass(frozen=True)
class WhiteheadAuto:
    partition: GWPartition
    multiplier: Letter

    def __post_init__(self):
        if not self.partition.is_base(self.multiplier):
            raise PartitionError(f"multiplier letter {self.multiplier} is not a base of the partition")

    @property
    def side(self) -> LetterSet:
        """Side containing the multiplier."""
        return self.partition.side_of(self.multiplier)

    @property
    def other_side(self) -> LetterSet:
        return self.partition.opposite(self.side)


@dataclass(frozen=True)
class GeneratorMap:
    images: Tuple[Word, ...]

    def __len__(self) -> int:
        return len(self.images)

    @property
    def max_image_length(self) -> int:
        return max((len(w) for w in self.images), default=0)


class Innerness(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class InnerVerdict(NamedTuple):
    status: Innerness
    conjugator: Optional[Word] = None


def format_auto(g: SimplicialGraph, aut: WhiteheadAuto) -> str:
    return f"phi({format_partition(g, aut.partition)}, {g.letter_name(aut.multiplier)})"


def format_map(g: SimplicialGraph, f: GeneratorMap) -> List[str]:
    return [f"{g.vertices[v]} -> {format_word(g, img)}" for v, img in enumerate(f.images)]


# ------------------------------
# Images and maps
# ------------------------------
def image_of_generator(g: SimplicialGraph, aut: WhiteheadAuto, v: VertexRef) -> Word:
    i = g.vertex_index(v)
    m = aut.multiplier
    if i == vertex_of(m):
        return (make_letter(i),)
    side = aut.side
    pos, neg = make_letter(i, 1), make_letter(i, -1)
    pos_in, neg_in = bool(side >> pos & 1), bool(side >> neg & 1)
    if pos_in and neg_in:
        return normalize(g, (m, pos, m ^ 1))
    if pos_in:
        return normalize(g, (pos, m ^ 1))
    if neg_in:
        return normalize(g, (m, pos))
    return (pos,)


def generator_kind(g: SimplicialGraph, aut: WhiteheadAuto, v: VertexRef) -> str:
    """fixed, right_fold (v -> v m^-1), left_fold (v -> m v) or partial_conjugation."""
    i = g.vertex_index(v)
    if i == vertex_of(aut.multiplier):
        return "fixed"
    side = aut.side
    pos_in = bool(side >> make_letter(i, 1) & 1)
    neg_in = bool(side >> make_letter(i, -1) & 1)
    if pos_in and neg_in:
        return "partial_conjugation"
    if pos_in:
        return "right_fold"
    if neg_in:
        return "left_fold"
    return "fixed"


def to_generator_map(g: SimplicialGraph, aut: WhiteheadAuto) -> GeneratorMap:
    return GeneratorMap(tuple(image_of_generator(g, aut, v) for v in range(g.n)))


@functools.lru_cache(maxsize=65536)
def cached_generator_map(g: SimplicialGraph, aut: WhiteheadAuto) -> GeneratorMap:
    return to_generator_map(g, aut)


def identity_map(g: SimplicialGraph) -> GeneratorMap:
    return GeneratorMap(tuple((make_letter(v),) for v in range(g.n)))


def conjugation_map(g: SimplicialGraph, w: Word) -> GeneratorMap:
    """v -> w^-1 v w"""
    w_inv = inverse_word(w)
    return GeneratorMap(tuple(normalize(g, w_inv + (make_letter(v),) + tuple(w)) for v in range(g.n)))


def inversion_map(g: SimplicialGraph, v: VertexRef) -> GeneratorMap:
    i = g.vertex_index(v)
    return GeneratorMap(tuple((make_letter(u, -1 if u == i else 1),) for u in range(g.n)))


def graph_automorphism_map(g: SimplicialGraph, sigma: Sequence[int]) -> GeneratorMap:
    return GeneratorMap(tuple((make_letter(sigma[v]),) for v in range(g.n)))


def apply_map(g: SimplicialGraph, f: GeneratorMap, w: Word, max_length: Optional[int] = None) -> Word:
    limit = pick(max_length, "words.max_word_length")
    letters: List[Letter] = []
    for x in w:
        image = f.images[x >> 1]
        letters.extend(inverse_word(image) if x & 1 else image)
    result = normalize(g, tuple(letters))
    if len(result) > limit:
        raise WordTooLongError(f"image of length {len(result)} exceeds the word ceiling {limit}")
    return result


def compose(g: SimplicialGraph, f1: GeneratorMap, f2: GeneratorMap, max_length: Optional[int] = None) -> GeneratorMap:
    """f1 after f2."""
    return GeneratorMap(tuple(apply_map(g, f1, image, max_length) for image in f2.images))


def compose_all(g: SimplicialGraph, maps: Sequence[GeneratorMap]) -> GeneratorMap:
    """maps[0] after maps[1] after ..."""
    result = identity_map(g)
    for f in maps:
        result = compose(g, result, f)
    return result


def invert(g: SimplicialGraph, aut: WhiteheadAuto) -> WhiteheadAuto:
    m = aut.multiplier
    side = (aut.side & ~bit(m)) | bit(inverse_letter(m))
    return WhiteheadAuto(make_partition(g, side, inverse_letter(m)), inverse_letter(m))


def map_power(g: SimplicialGraph, aut: WhiteheadAuto, k: int) -> GeneratorMap:
    step = to_generator_map(g, aut if k >= 0 else invert(g, aut))
    result = identity_map(g)
    for _ in range(abs(k)):
        result = compose(g, step, result)
    return result


def abelian_action(g: SimplicialGraph, f: GeneratorMap) -> np.ndarray:
    """Matrix of the induced map on Z^V; column v is the abelianized image of v."""
    if g.n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    return np.stack([abelianization(g, image) for image in f.images], axis=1)


# ------------------------------
# Folds and partial conjugations
# ------------------------------
def right_fold(g: SimplicialGraph, v: VertexRef, m: Union[str, Letter]) -> WhiteheadAuto:
    """v -> v m"""
    m = g.letter(m)
    multiplier = inverse_letter(m)
    return WhiteheadAuto(make_partition(g, bit(make_letter(g.vertex_index(v))) | bit(multiplier), multiplier), multiplier)


def left_fold(g: SimplicialGraph, v: VertexRef, m: Union[str, Letter]) -> WhiteheadAuto:
    """v -> m v"""
    m = g.letter(m)
    return WhiteheadAuto(make_partition(g, bit(make_letter(g.vertex_index(v), -1)) | bit(m), m), m)


def partial_conjugation(g: SimplicialGraph, component: Sequence[VertexRef], m: Union[str, Letter]) -> WhiteheadAuto:
    """v -> m v m^-1 for every v in ``component``."""
    m = g.letter(m)
    return WhiteheadAuto(make_partition(g, pm(g.vertex_mask(component)) | bit(m), m), m)


# ------------------------------
# Commutation
# ------------------------------
def outer_commute_predicate(g: SimplicialGraph, a1: WhiteheadAuto, a2: WhiteheadAuto) -> bool:
    """Outer commutation criterion: commuting multipliers, or compatible with neither splitting the other's multiplier."""
    m, n = a1.multiplier, a2.multiplier
    if g.commute(m, n):
        return True
    return (
        compatible(g, a1.partition, a2.partition, Mode.STRONG)
        and not splits(g, a2.partition, vertex_of(m))
        and not splits(g, a1.partition, vertex_of(n))
    )


def is_inner(g: SimplicialGraph, f: GeneratorMap, bound: Optional[int] = None) -> InnerVerdict:
    """
    Decide whether ``f`` is conjugation v -> w^-1 v w.

    Writing f(v) = p v p^-1, the possible w^-1 form the coset p<st(v)>, so f
    is inner exactly when these cosets meet over all v. NO is exact; YES
    comes with the shortest conjugator. UNKNOWN is only returned when that
    conjugator is longer than ``bound``.

    Args:
        g: the defining graph
        f: generator map
        bound: conjugator length bound (None for no bound)
    """
    if g.n == 0:
        return InnerVerdict(Innerness.YES, ())

    coset: Word = ()
    letters = g.all_vertices
    for v in range(g.n):
        # a generator is the only cyclically reduced word in its conjugacy class
        prefix, core = cyclic_reduce(g, f.images[v])
        if core != (make_letter(v),):
            return InnerVerdict(Innerness.NO)
        coset = coset_meet(g, coset, letters, prefix, g.star_mask(v))
        if coset is None:
            return InnerVerdict(Innerness.NO)
        letters &= g.star_mask(v)

    w_inv, _ = split_suffix(g, coset, letters)
    w = inverse_word(w_inv)
    if bound is not None and len(w) > bound:
        return InnerVerdict(Innerness.UNKNOWN)
    targets = [normalize(g, image) for image in f.images]
    if any(normalize(g, w_inv + (make_letter(v),) + w) != targets[v] for v in range(g.n)):
        logger.error(f"Coset meet gave a conjugator that does not reproduce the map: {format_word(g, w)}")
        return InnerVerdict(Innerness.UNKNOWN)
    return InnerVerdict(Innerness.YES, w)


def outer_commute_oracle(g: SimplicialGraph, a1: WhiteheadAuto, a2: WhiteheadAuto, bound: Optional[int] = None) -> Optional[bool]:
    """Brute-force check that a1 a2 a1^-1 a2^-1 is inner; None when undecided."""
    bound = pick(bound, "whitehead.oracle_bound")
    f1, f2 = to_generator_map(g, a1), to_generator_map(g, a2)
    i1, i2 = to_generator_map(g, invert(g, a1)), to_generator_map(g, invert(g, a2))
    commutator = compose(g, compose(g, f1, f2), compose(g, i1, i2))
    verdict = is_inner(g, commutator, bound)
    if verdict.status is Innerness.UNKNOWN:
        logger.warning(f"Innerness undecided at bound {bound} for {format_auto(g, a1)} and {format_auto(g, a2)}")
        return None
    return verdict.status is Innerness.YES


# ------------------------------
# Nest decomposition
# ------------------------------
@dataclass(frozen=True)
class NestDecomposition:
    """Factors (auto, exponent) and an optional final conjugation v -> w^-1 v w."""

    factors: Tuple[Tuple[WhiteheadAuto, int], ...]
    conjugator: Word = ()

    def to_generator_map(self, g: SimplicialGraph) -> GeneratorMap:
        maps = [map_power(g, aut, e) for aut, e in self.factors]
        result = compose_all(g, maps)
        if self.conjugator:
            result = compose(g, conjugation_map(g, self.conjugator), result)
        return result


def telescope_chain(g: SimplicialGraph, sides: Sequence[LetterSet], m: Letter) -> List[LetterSet]:
    """
    Order sides containing m by inclusion and close the chain.

    Returns:
        [{m}, P_1, ..., P_k, top] with top = V± - lk(m)± - {m^-1}

    Raises:
        NestError: when the sides are not nested
    """
    chain = sorted(set(sides), key=popcount)
    for smaller, larger in zip(chain, chain[1:]):
        if smaller & ~larger:
            raise NestError("sides containing the multiplier are not nested")
    top = g.all_letters & ~pm(g.link_mask(vertex_of(m))) & ~bit(inverse_letter(m))
    return [bit(m)] + [s for s in chain if s not in (bit(m), top)] + [top]


def single_side_auto(g: SimplicialGraph, side: LetterSet, m: Letter) -> Optional[Union[WhiteheadAuto, Word]]:
    """Automorphism phi(side, m); None for the thin side {m}, a conjugator word for the top side."""
    if side == bit(m):
        return None
    top = g.all_letters & ~pm(g.link_mask(vertex_of(m))) & ~bit(inverse_letter(m))
    if side == top:
        return (inverse_letter(m),)
    return WhiteheadAuto(make_partition(g, side, m), m)


def decompose_in_nest(g: SimplicialGraph, q: GWPartition, nest_parts: Sequence[GWPartition], m: Union[str, Letter]) -> NestDecomposition:
    """
    Express phi(Q, m) through the automorphisms of a nest based at m.

    Args:
        g: the defining graph
        q: partition based at m
        nest_parts: compatible partitions based at m whose sides containing m are nested
        m: the common multiplier

    Returns:
        Decomposition whose product equals phi(Q, m) exactly as generator maps

    Raises:
        NestError: when q's side is not a union of consecutive nest steps
    """
    m = g.letter(m)
    if not q.is_base(m):
        raise NestError(f"{g.letter_name(m)} is not a base of q")
    for part in nest_parts:
        if not part.is_base(m):
            raise NestError(f"nest member not based at {g.letter_name(m)}")
    chain = telescope_chain(g, [part.side_of(m) for part in nest_parts], m)
    target = q.side_of(m)
    rest = target & ~bit(m)

    chosen = set()
    covered = 0
    for i in range(1, len(chain)):
        step = chain[i] & ~chain[i - 1]
        if step & target == step:
            chosen.add(i)
            covered |= step
        elif step & target:
            raise NestError("nest not maximal: q's side cuts a nest step")
    if covered != rest:
        raise NestError("nest not maximal: q's side is not a union of nest steps")

    top_index = len(chain) - 1
    factors: List[Tuple[WhiteheadAuto, int]] = []
    for j in range(1, top_index):
        exponent = (j in chosen) - (j + 1 in chosen)
        if exponent:
            factors.append((WhiteheadAuto(make_partition(g, chain[j], m), m), exponent))
    conjugator = (inverse_letter(m),) if top_index in chosen else ()
    result = NestDecomposition(tuple(factors), conjugator)

    expected = to_generator_map(g, WhiteheadAuto(q, m))
    if result.to_generator_map(g) != expected:
        raise NestError("telescoping product does not reproduce phi(Q, m)")
    return result

