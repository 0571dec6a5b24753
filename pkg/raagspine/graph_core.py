"""
Defining graphs of right-angled Artin groups.

A graph is parsed once into an immutable :class:`SimplicialGraph`; every
other module asks it for links, stars and letters. Vertices are numbered in
declaration order and all enumerations follow that order, so every result
in the package is deterministic.

Letters of V± are encoded as ``2 * vertex + sign_bit`` (sign bit 1 for the
inverse) and sets of letters as Python ints used as bit vectors.

Classes:
    SimplicialGraph -- vertex names plus a link bitmask per vertex
    VertexClass -- one equivalence class of the order <=, flagged abelian or not
    VertexRelations -- the orders <=o, <=*, <= with classes, principal and maximal vertices
    Verdict -- boolean answer with an optional witness

Functions:
    parse_graph, format_graph, link, star, relations, vertex_class, distance,
    components_outside_link, inseparable_sets, is_barbed, graph_automorphisms
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import networkx as nx
from loguru import logger

from raagspine.errors import GraphParseError, UnknownVertexError

Letter = int
LetterSet = int
VertexRef = Union[str, int]

RESERVED_CHARACTERS = set("-^|{}*#:,@")


# ------------------------------
# Letters and letter sets
# ------------------------------
def make_letter(vertex: int, sign: int = 1) -> Letter:
    return 2 * vertex + (0 if sign > 0 else 1)


def vertex_of(letter: Letter) -> int:
    return letter >> 1


def sign_of(letter: Letter) -> int:
    return -1 if letter & 1 else 1


def inverse_letter(letter: Letter) -> Letter:
    return letter ^ 1


def bit(letter: Letter) -> LetterSet:
    return 1 << letter


def popcount(mask: int) -> int:
    return mask.bit_count()


def lowest(mask: int) -> int:
    """Index of the lowest set bit (-1 for an empty mask)."""
    return (mask & -mask).bit_length() - 1


def iter_bits(mask: int) -> Iterator[int]:
    """Set bit indices in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def pm(vertex_mask: int) -> LetterSet:
    """Both letters of every vertex in ``vertex_mask``."""
    out = 0
    for v in iter_bits(vertex_mask):
        out |= 3 << (2 * v)
    return out


def vertices_of(letters: LetterSet) -> int:
    """Vertex mask of the vertices touched by ``letters``."""
    out = 0
    for letter in iter_bits(letters):
        out |= 1 << (letter >> 1)
    return out


# ------------------------------
# The graph
# ------------------------------
@dataclass(frozen=True)
class SimplicialGraph:
    """Finite simplicial graph; ``links[i]`` is the neighbour bitmask of vertex ``i``."""

    vertices: Tuple[str, ...]
    links: Tuple[int, ...]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphParseError("vertex names must be unique")
        if len(self.links) != len(self.vertices):
            raise GraphParseError("one link mask per vertex is required")
        full = (1 << len(self.vertices)) - 1
        for i, mask in enumerate(self.links):
            if mask & ~full:
                raise GraphParseError(f"link of {self.vertices[i]} mentions unknown vertices")
            if mask >> i & 1:
                raise GraphParseError(f"loop edge at {self.vertices[i]}")
            for j in iter_bits(mask):
                if not self.links[j] >> i & 1:
                    raise GraphParseError(f"adjacency of {self.vertices[i]} and {self.vertices[j]} is not symmetric")

    @classmethod
    def from_edges(cls, vertices: Sequence[str], edges: Iterable[Tuple[str, str]]) -> "SimplicialGraph":
        index = {name: i for i, name in enumerate(vertices)}
        links = [0] * len(vertices)
        for a, b in edges:
            if a not in index or b not in index:
                raise UnknownVertexError(f"edge {a}-{b} uses an undeclared vertex")
            if a == b:
                raise GraphParseError(f"loop edge {a}-{b}")
            links[index[a]] |= 1 << index[b]
            links[index[b]] |= 1 << index[a]
        return cls(tuple(vertices), tuple(links))

    # -- vertices --------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def index(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.vertices)}

    @property
    def all_vertices(self) -> int:
        return (1 << self.n) - 1

    @property
    def all_letters(self) -> LetterSet:
        return (1 << (2 * self.n)) - 1

    def vertex_index(self, v: VertexRef) -> int:
        if isinstance(v, int):
            if 0 <= v < self.n:
                return v
            raise UnknownVertexError(f"vertex index {v} out of range")
        try:
            return self.index[v]
        except KeyError:
            raise UnknownVertexError(f"unknown vertex '{v}'") from None

    def vertex_mask(self, vertices: Iterable[VertexRef]) -> int:
        out = 0
        for v in vertices:
            out |= 1 << self.vertex_index(v)
        return out

    def names(self, vertex_mask: int) -> FrozenSet[str]:
        return frozenset(self.vertices[i] for i in iter_bits(vertex_mask))

    def sorted_names(self, vertex_mask: int) -> List[str]:
        return [self.vertices[i] for i in iter_bits(vertex_mask)]

    def edges(self) -> List[Tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in iter_bits(self.links[i]) if i < j]

    # -- adjacency -------------------------------------------------------
    def adjacent(self, i: int, j: int) -> bool:
        return bool(self.links[i] >> j & 1)

    def link_mask(self, i: int) -> int:
        return self.links[i]

    def star_mask(self, i: int) -> int:
        return self.links[i] | (1 << i)

    def commute(self, a: Letter, b: Letter) -> bool:
        """Whether two letters commute in A_Gamma ([a, b] = 1)."""
        va, vb = a >> 1, b >> 1
        return va == vb or bool(self.links[va] >> vb & 1)

    # -- letters ---------------------------------------------------------
    def letter(self, text: Union[str, Letter]) -> Letter:
        """Parse ``name`` or ``name^-1`` into a letter."""
        if isinstance(text, int):
            if 0 <= text < 2 * self.n:
                return text
            raise UnknownVertexError(f"letter code {text} out of range")
        token = text.strip()
        if token.endswith("^-1"):
            return make_letter(self.vertex_index(token[:-3]), -1)
        if token.endswith("^1"):
            token = token[:-2]
        return make_letter(self.vertex_index(token), 1)

    def letter_name(self, letter: Letter) -> str:
        name = self.vertices[letter >> 1]
        return f"{name}^-1" if letter & 1 else name

    def letter_set(self, letters: Union[str, Iterable[Union[str, Letter]]]) -> LetterSet:
        if isinstance(letters, str):
            letters = letters.replace(",", " ").split()
        out = 0
        for token in letters:
            out |= 1 << self.letter(token)
        return out

    def format_letters(self, mask: LetterSet) -> str:
        return " ".join(self.letter_name(letter) for letter in iter_bits(mask))

    # -- networkx view ---------------------------------------------------
    @cached_property
    def nx_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges())
        return graph


def to_networkx(g: SimplicialGraph) -> nx.Graph:
    """Graph on vertex indices (shared, do not mutate)."""
    return g.nx_graph


# ------------------------------
# Graph file format
# ------------------------------
def parse_graph(text: str) -> SimplicialGraph:
    """
    Parse the graph file format.

    Args:
        text: ``#`` comments, one ``vertices:`` line and an ``edges:`` section
              of whitespace-separated ``u-v`` tokens

    Returns:
        The graph with vertices in declaration order
    """
    names: Optional[List[str]] = None
    index: Dict[str, int] = {}
    edges: List[Tuple[str, str]] = []
    in_edges = False

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("vertices:"):
            if names is not None:
                raise GraphParseError("second 'vertices:' line", number)
            names = []
            for name in line[len("vertices:"):].split():
                if name in index:
                    raise GraphParseError(f"duplicate vertex '{name}'", number)
                if RESERVED_CHARACTERS & set(name) or name == "1":
                    raise GraphParseError(f"invalid vertex name '{name}'", number)
                index[name] = len(names)
                names.append(name)
            continue
        if line.startswith("edges:"):
            if names is None:
                raise GraphParseError("'edges:' before 'vertices:'", number)
            in_edges = True
            tokens = line[len("edges:"):].split()
        elif in_edges:
            tokens = line.split()
        else:
            raise GraphParseError(f"unexpected line '{line}'", number)

        for token in tokens:
            parts = token.split("-")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise GraphParseError(f"malformed edge '{token}'", number)
            a, b = parts
            for end in (a, b):
                if end not in index:
                    raise GraphParseError(f"unknown vertex '{end}' in edge '{token}'", number)
            if a == b:
                raise GraphParseError(f"loop edge '{token}'", number)
            edges.append((a, b))

    if names is None:
        raise GraphParseError("missing 'vertices:' line")
    graph = SimplicialGraph.from_edges(names, edges)
    logger.debug(f"Parsed graph with {graph.n} vertices and {len(graph.edges())} edges")
    return graph


def format_graph(g: SimplicialGraph) -> str:
    edges = " ".join(f"{g.vertices[i]}-{g.vertices[j]}" for i, j in g.edges())
    return f"vertices: {' '.join(g.vertices)}\nedges: {edges}\n".replace("edges: \n", "edges:\n")


# ------------------------------
# Links, stars, distance
# ------------------------------
def link(g: SimplicialGraph, v: VertexRef) -> FrozenSet[str]:
    return g.names(g.link_mask(g.vertex_index(v)))


def star(g: SimplicialGraph, v: VertexRef) -> FrozenSet[str]:
    return g.names(g.star_mask(g.vertex_index(v)))


def distance(g: SimplicialGraph, u: VertexRef, v: VertexRef) -> Union[int, float]:
    """BFS distance; ``math.inf`` when u and v lie in different components."""
    i, j = g.vertex_index(u), g.vertex_index(v)
    try:
        return nx.shortest_path_length(g.nx_graph, i, j)
    except nx.NetworkXNoPath:
        return math.inf


@functools.lru_cache(maxsize=4096)
def _distances(g: SimplicialGraph) -> Tuple[Tuple[Union[int, float], ...], ...]:
    lengths = dict(nx.all_pairs_shortest_path_length(g.nx_graph))
    return tuple(tuple(lengths[i].get(j, math.inf) for j in range(g.n)) for i in range(g.n))


def distance_table(g: SimplicialGraph) -> Tuple[Tuple[Union[int, float], ...], ...]:
    """All-pairs distances indexed by vertex index."""
    return _distances(g)


def is_connected(g: SimplicialGraph) -> bool:
    return g.n > 0 and nx.is_connected(g.nx_graph)


# ------------------------------
# Vertex orders and classes
# ------------------------------
@dataclass(frozen=True)
class VertexClass:
    members: Tuple[int, ...]
    abelian: bool

    @property
    def mask(self) -> int:
        out = 0
        for v in self.members:
            out |= 1 << v
        return out

    @property
    def representative(self) -> int:
        return self.members[0]


@dataclass(frozen=True)
class VertexRelations:
    """Pairs (u, v) of vertex indices with u <=o v, u <=* v and u <= v."""

    leq_circ: FrozenSet[Tuple[int, int]]
    leq_star: FrozenSet[Tuple[int, int]]
    leq: FrozenSet[Tuple[int, int]]
    classes: Tuple[VertexClass, ...]
    principal: FrozenSet[int]
    maximal: FrozenSet[int]

    def class_of(self, v: int) -> VertexClass:
        for cls in self.classes:
            if v in cls.members:
                return cls
        raise UnknownVertexError(f"vertex index {v} has no class")

    def lt_circ(self, u: int, v: int) -> bool:
        """lk(u) strictly inside lk(v)."""
        return (u, v) in self.leq_circ and (v, u) not in self.leq_circ

    def equivalent(self, u: int, v: int) -> bool:
        return (u, v) in self.leq and (v, u) in self.leq

    @property
    def principal_mask(self) -> int:
        out = 0
        for v in self.principal:
            out |= 1 << v
        return out


@functools.lru_cache(maxsize=4096)
def relations(g: SimplicialGraph) -> VertexRelations:
    n = g.n
    leq_circ = set()
    leq_star = set()
    leq = set()
    for u in range(n):
        lk_u, st_u = g.link_mask(u), g.star_mask(u)
        for v in range(n):
            lk_v, st_v = g.link_mask(v), g.star_mask(v)
            if lk_u & ~lk_v == 0:
                leq_circ.add((u, v))
            if st_u & ~st_v == 0:
                leq_star.add((u, v))
            if lk_u & ~st_v == 0:
                leq.add((u, v))

    classes: List[VertexClass] = []
    seen = 0
    for v in range(n):
        if seen >> v & 1:
            continue
        members = tuple(w for w in range(n) if (v, w) in leq and (w, v) in leq)
        same_link = [w for w in members if g.link_mask(w) == g.link_mask(v)]
        classes.append(VertexClass(members, abelian=len(same_link) == 1))
        for w in members:
            seen |= 1 << w

    principal = frozenset(
        v for v in range(n)
        if not any((v, w) in leq_circ and (w, v) not in leq_circ for w in range(n))
    )
    maximal = frozenset(
        v for v in range(n)
        if all((w, v) in leq for w in range(n) if (v, w) in leq)
    )
    return VertexRelations(
        frozenset(leq_circ), frozenset(leq_star), frozenset(leq),
        tuple(classes), principal, maximal,
    )


def vertex_class(g: SimplicialGraph, v: VertexRef) -> VertexClass:
    """The equivalence class [v] under <=, flagged abelian or not."""
    return relations(g).class_of(g.vertex_index(v))


# ------------------------------
# Components and inseparable sets
# ------------------------------
@functools.lru_cache(maxsize=16384)
def components_outside_link(g: SimplicialGraph, v: int) -> Tuple[int, ...]:
    """Vertex masks of the components of Gamma - lk(v), sorted by least vertex."""
    removed = g.link_mask(v)
    keep = [i for i in range(g.n) if not removed >> i & 1]
    components = []
    for component in nx.connected_components(g.nx_graph.subgraph(keep)):
        mask = 0
        for i in component:
            mask |= 1 << i
        components.append(mask)
    return tuple(sorted(components, key=lowest))


@functools.lru_cache(maxsize=16384)
def _inseparable(g: SimplicialGraph, v: int) -> Tuple[LetterSet, ...]:
    blocks = []
    for component in components_outside_link(g, v):
        if popcount(component) == 1:
            u = lowest(component)
            blocks.append(bit(make_letter(u, 1)))
            blocks.append(bit(make_letter(u, -1)))
        else:
            blocks.append(pm(component))
    return tuple(sorted(blocks, key=lowest))


def inseparable_sets(g: SimplicialGraph, m: Union[str, Letter]) -> Tuple[LetterSet, ...]:
    """The m-inseparable sets I(m) as letter masks, sorted by least letter."""
    return _inseparable(g, vertex_of(g.letter(m)))


# ------------------------------
# Barbed graphs
# ------------------------------
class Verdict(NamedTuple):
    holds: bool
    witness: Optional[Tuple[str, ...]] = None


def is_barbed(g: SimplicialGraph) -> Verdict:
    """Every non-principal u has lk(u) strictly inside lk(v) whenever d(u, v) = 2."""
    rel = relations(g)
    table = distance_table(g)
    for u in range(g.n):
        if u in rel.principal:
            continue
        for v in range(g.n):
            if table[u][v] == 2 and not rel.lt_circ(u, v):
                return Verdict(False, (g.vertices[u], g.vertices[v]))
    return Verdict(True)


# ------------------------------
# Graph automorphisms
# ------------------------------
@functools.lru_cache(maxsize=1024)
def _automorphisms(g: SimplicialGraph) -> Tuple[Tuple[int, ...], ...]:
    matcher = nx.algorithms.isomorphism.GraphMatcher(g.nx_graph, g.nx_graph)
    perms = sorted(tuple(mapping[i] for i in range(g.n)) for mapping in matcher.isomorphisms_iter())
    logger.debug(f"Found {len(perms)} graph automorphisms")
    return tuple(perms)


def graph_automorphisms(g: SimplicialGraph) -> List[Tuple[int, ...]]:
    """Adjacency-preserving permutations; ``perm[i]`` is the image of vertex ``i``."""
    return list(_automorphisms(g))
