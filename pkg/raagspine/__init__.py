"""
raagspine: untwisted automorphisms of right-angled Artin groups.

Graphs, words, Gamma-Whitehead partitions and automorphisms, maximum
compatible collections and the star of the spine with its collapse.
"""

from raagspine.errors import (
    CollectionError,
    CommutationError,
    GraphParseError,
    NestError,
    PartitionError,
    RaagSpineError,
    SearchBudgetExceeded,
    TheoremViolation,
    UnknownVertexError,
    WordError,
    WordTooLongError,
)
from raagspine.fixtures import load_fixture, random_graphs
from raagspine.graph_core import (
    SimplicialGraph,
    distance,
    graph_automorphisms,
    inseparable_sets,
    is_barbed,
    link,
    parse_graph,
    relations,
    star,
    vertex_class,
)
from raagspine.partitions import (
    GWPartition,
    Mode,
    compatible,
    enumerate_partitions,
    exchange,
    format_partition,
    make_partition,
    nest,
    parse_partition,
)
from raagspine.rank_search import (
    CompatibleCollection,
    RankReport,
    build_abelian_generators,
    complete_abelian,
    condition_holds,
    m_single_closed_form,
    max_compatible,
    normalize_class,
    verify_abelian_rank,
)
from raagspine.raag_words import cyclic_normal_form, is_conjugate, normalize, parse_word
from raagspine.spine import build_star, collapse_pass, find_irreplaceable, is_irreplaceable, is_sandwiched
from raagspine.whitehead import (
    GeneratorMap,
    WhiteheadAuto,
    compose,
    decompose_in_nest,
    image_of_generator,
    invert,
    is_inner,
    outer_commute_oracle,
    outer_commute_predicate,
    to_generator_map,
)

__version__ = "0.1.0"
