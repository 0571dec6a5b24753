"""
Named example graphs and seeded random graphs.

Fixture names:
    EDGELESS(n)   n isolated vertices a, b, c, ...
    PATH3         a-b-c
    TRIANGLE      complete graph on a, b, c
    EX1           m with four neighbours x1..x4; u on x1, x2; v1 on x4; v2 on x3; v1-v2
    DIAMONDS(d)   d squares c(i-1)-a(i)-c(i)-b(i) glued in a chain
    FORK          v0-v1 with three prongs v1-ai-bi
    SIMPLETREE    v0-v1 with two prongs v1-ai-bi
    NONBARBED     w joined to leaves u, v and to the path p-q
    EDGE_AND_POINTS  the edge v-w plus isolated a, b
"""

import re
import string
from typing import Callable, Dict, List, Tuple

import networkx as nx
import numpy as np
from loguru import logger

from raagspine.config import pick
from raagspine.errors import RaagSpineError
from raagspine.graph_core import SimplicialGraph, is_connected, parse_graph

# ------------------------------
# Fixture texts
# ------------------------------
PATH3 = """
vertices: a b c
edges: a-b b-c
"""

TRIANGLE = """
vertices: a b c
edges: a-b b-c a-c
"""

EX1 = """
# m-inseparable sets: {m} {m^-1} {u} {u^-1} {v1 v2}±
vertices: m x1 x2 x3 x4 u v1 v2
edges: m-x1 m-x2 m-x3 m-x4
       u-x1 u-x2
       v1-x4 v2-x3 v1-v2
"""

FORK = """
vertices: v0 v1 a1 a2 a3 b1 b2 b3
edges: v0-v1 v1-a1 v1-a2 v1-a3 a1-b1 a2-b2 a3-b3
"""

SIMPLETREE = """
vertices: v0 v1 a1 b1 a2 b2
edges: v0-v1 v1-a1 a1-b1 v1-a2 a2-b2
"""

NONBARBED = """
vertices: w u v p q
edges: w-u w-v w-p p-q
"""

EDGE_AND_POINTS = """
vertices: v w a b
edges: v-w
"""


def edgeless(n: int) -> str:
    if n < 1:
        raise RaagSpineError("EDGELESS needs at least one vertex")
    names = list(string.ascii_lowercase[:n]) if n <= 26 else [f"v{i}" for i in range(n)]
    return f"vertices: {' '.join(names)}\nedges:\n"


def diamonds(d: int) -> str:
    if d < 1:
        raise RaagSpineError("DIAMONDS needs at least one diamond")
    names = ["c0"]
    edges = []
    for i in range(1, d + 1):
        names.extend([f"a{i}", f"b{i}", f"c{i}"])
        for middle in (f"a{i}", f"b{i}"):
            edges.extend([f"c{i - 1}-{middle}", f"{middle}-c{i}"])
    return f"vertices: {' '.join(names)}\nedges: {' '.join(edges)}\n"


FIXTURES: Dict[str, str] = {
    "PATH3": PATH3,
    "TRIANGLE": TRIANGLE,
    "EX1": EX1,
    "FORK": FORK,
    "SIMPLETREE": SIMPLETREE,
    "NONBARBED": NONBARBED,
    "EDGE_AND_POINTS": EDGE_AND_POINTS,
}

PARAMETERIZED: Dict[str, Callable[[int], str]] = {
    "EDGELESS": edgeless,
    "DIAMONDS": diamonds,
}

_PARAM_NAME = re.compile(r"^([A-Z_0-9]+)\((\d+)\)$")


def load_fixture(name: str) -> SimplicialGraph:
    """
    Build a named fixture graph.

    Args:
        name: a plain name such as ``FORK`` or a parameterized one such as ``DIAMONDS(2)``

    Returns:
        The fixture graph
    """
    key = name.strip().upper()
    if key in FIXTURES:
        return parse_graph(FIXTURES[key])
    match = _PARAM_NAME.match(key)
    if match and match.group(1) in PARAMETERIZED:
        return parse_graph(PARAMETERIZED[match.group(1)](int(match.group(2))))
    raise RaagSpineError(f"unknown fixture '{name}'")


def fixture_names() -> List[str]:
    """Fixtures used by the property checks (parameterized ones at small sizes)."""
    return ["EDGELESS(2)", "EDGELESS(3)", "EDGELESS(4)", "PATH3", "TRIANGLE", "EX1",
            "DIAMONDS(1)", "DIAMONDS(2)", "FORK", "SIMPLETREE", "NONBARBED", "EDGE_AND_POINTS"]


# ------------------------------
# Random graphs
# ------------------------------
def random_graphs(
    seed: int = None,
    count: int = None,
    max_vertices: int = None,
    edge_probability: float = None,
    max_partitions: int = None,
    connected: bool = False,
) -> List[Tuple[str, SimplicialGraph]]:
    """
    Seeded Erdos-Renyi graphs with 1..max_vertices vertices.

    Draws with more than ``max_partitions`` partitions are skipped so that
    exhaustive searches stay small, and so are disconnected draws when
    ``connected`` is set.

    Returns:
        (name, graph) pairs, names of the form RANDOM(seed:index)
    """
    from raagspine.partitions import enumerate_partitions

    seed = pick(seed, "verify.seed")
    count = pick(count, "verify.random_graphs")
    max_vertices = pick(max_vertices, "verify.max_random_vertices")
    edge_probability = pick(edge_probability, "verify.edge_probability")
    max_partitions = pick(max_partitions, "verify.max_partitions")

    rng = np.random.default_rng(seed)
    graphs: List[Tuple[str, SimplicialGraph]] = []
    draws = 0
    while len(graphs) < count:
        draws += 1
        if draws > 50 * count:
            logger.warning(f"Stopped after {draws} draws with {len(graphs)} usable random graphs")
            break
        n = int(rng.integers(1, max_vertices + 1))
        upper = np.triu(rng.random((n, n)) < edge_probability, k=1)
        names = [f"v{i}" for i in range(n)]
        edges = [(names[i], names[j]) for i, j in zip(*np.nonzero(upper))]
        graph = SimplicialGraph.from_edges(names, edges)
        if connected and not is_connected(graph):
            continue
        if len(enumerate_partitions(graph)) > max_partitions:
            continue
        graphs.append((f"RANDOM({seed}:{draws})", graph))
    return graphs


def random_trees(
    seed: int = None,
    count: int = None,
    max_vertices: int = None,
    max_partitions: int = None,
) -> List[Tuple[str, SimplicialGraph]]:
    """
    Seeded uniform labelled trees on 2..max_vertices + 1 vertices, drawn as
    Pruefer sequences and capped by ``max_partitions`` like :func:`random_graphs`.

    Returns:
        (name, graph) pairs, names of the form TREE(seed:index)
    """
    from raagspine.partitions import enumerate_partitions

    seed = pick(seed, "verify.seed")
    count = pick(count, "verify.random_trees")
    max_vertices = pick(max_vertices, "verify.max_random_vertices") + 1
    max_partitions = pick(max_partitions, "verify.max_partitions")

    rng = np.random.default_rng(seed)
    graphs: List[Tuple[str, SimplicialGraph]] = []
    draws = 0
    while len(graphs) < count:
        draws += 1
        if draws > 50 * count:
            logger.warning(f"Stopped after {draws} draws with {len(graphs)} usable random trees")
            break
        n = int(rng.integers(2, max_vertices + 1))
        sequence = [int(x) for x in rng.integers(0, n, size=n - 2)]
        tree = nx.from_prufer_sequence(sequence)
        names = [f"t{i}" for i in range(n)]
        graph = SimplicialGraph.from_edges(names, [(names[i], names[j]) for i, j in tree.edges()])
        if len(enumerate_partitions(graph)) > max_partitions:
            continue
        graphs.append((f"TREE({seed}:{draws})", graph))
    return graphs
