import itertools
import unittest

import pytest

from raagspine.errors import CollectionError, CommutationError, SearchBudgetExceeded
from raagspine.fixtures import load_fixture
from raagspine.graph_core import relations, vertex_of
from raagspine.partitions import Mode, compatible, exchange, make_partition
from raagspine.rank_search import (
    CliqueSearch,
    build_abelian_generators,
    compatibility_graph,
    complete_abelian,
    condition_holds,
    easy_condition_holds,
    exponent_order,
    far_apart_pairs,
    make_collection,
    m_single_closed_form,
    max_compatible,
    missing_exchanges,
    normalize_class,
    resolve_base_set,
    vcd_bounds,
    verify_abelian_rank,
)
from raagspine.whitehead import WhiteheadAuto, invert, left_fold, to_generator_map


class TestMaxCompatible(unittest.TestCase):
    def test_edgeless_free_groups(self):
        for n in (2, 3, 4):
            self.assertEqual(max_compatible(load_fixture(f"EDGELESS({n})"), "V").m_value, 2 * n - 3)

    def test_triangle(self):
        self.assertEqual(max_compatible(load_fixture("TRIANGLE"), "V").m_value, 0)

    def test_fork(self):
        g = load_fixture("FORK")
        self.assertEqual(max_compatible(g, "L").m_value, 8)
        self.assertEqual(max_compatible(g, "V").m_value, 10)
        self.assertEqual(vcd_bounds(g), (8, 10))

    def test_simple_tree(self):
        g = load_fixture("SIMPLETREE")
        self.assertEqual(max_compatible(g, "V").m_value, 6)
        self.assertEqual(max_compatible(g, "L").m_value, 5)
        self.assertEqual(max_compatible(g, ["v0", "a1", "a2"]).m_value, 3)

    def test_witness(self):
        g = load_fixture("SIMPLETREE")
        report = max_compatible(g, "L")
        principal = relations(g).principal_mask
        self.assertEqual(len(report.witness), report.m_value)
        self.assertTrue(report.witness.is_pairwise_compatible(g))
        for part in report.witness:
            self.assertTrue(part.base_vertices & principal)
        self.assertEqual(report.base_set, ("v1", "a1", "a2"))

    def test_witness_is_deterministic(self):
        g = load_fixture("EX1")
        self.assertEqual(max_compatible(g, "V").witness, max_compatible(g, "V", budget=10**6).witness)

    def test_weak_equals_strong(self):
        for name in ("EX1", "SIMPLETREE", "DIAMONDS(1)", "EDGE_AND_POINTS"):
            g = load_fixture(name)
            self.assertEqual(
                max_compatible(g, "V", Mode.WEAK).m_value,
                max_compatible(g, "V", Mode.STRONG).m_value,
                name,
            )

    def test_budget(self):
        with self.assertRaises(SearchBudgetExceeded):
            max_compatible(load_fixture("FORK"), "V", budget=1)


class TestBaseSets(unittest.TestCase):
    def test_resolve(self):
        g = load_fixture("FORK")
        self.assertEqual(resolve_base_set(g, None), g.all_vertices)
        self.assertEqual(resolve_base_set(g, "V"), g.all_vertices)
        self.assertEqual(g.names(resolve_base_set(g, "L")), frozenset({"v1", "a1", "a2", "a3"}))
        self.assertEqual(resolve_base_set(g, "v0,b1"), g.vertex_mask(["v0", "b1"]))
        self.assertEqual(resolve_base_set(g, 0b11), 0b11)


class TestClosedForm(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(m_single_closed_form(load_fixture("EX1"), "m"), 2)
        self.assertEqual(m_single_closed_form(load_fixture("FORK"), "v1"), 5)
        self.assertEqual(m_single_closed_form(load_fixture("TRIANGLE"), "a"), 0)

    def test_matches_search(self):
        for name in ("EX1", "FORK", "SIMPLETREE", "EDGELESS(3)"):
            g = load_fixture(name)
            for v in g.vertices:
                self.assertEqual(m_single_closed_form(g, v), max_compatible(g, [v]).m_value, f"{name}:{v}")


class TestConditions(unittest.TestCase):
    def test_fork_fails(self):
        verdict = condition_holds(load_fixture("FORK"))
        self.assertFalse(verdict.holds)
        self.assertEqual(verdict.witness, ("v0", "a1", "a2"))

    def test_diamonds_hold(self):
        g = load_fixture("DIAMONDS(2)")
        self.assertTrue(condition_holds(g).holds)
        self.assertEqual(max_compatible(g, "V").m_value, max_compatible(g, "L").m_value)

    def test_edgeless_vacuous(self):
        self.assertTrue(condition_holds(load_fixture("EDGELESS(3)")).holds)

    def test_easy_condition(self):
        self.assertFalse(easy_condition_holds(load_fixture("FORK")).holds)
        self.assertTrue(easy_condition_holds(load_fixture("DIAMONDS(2)")).holds)

    def test_far_apart_pairs(self):
        self.assertEqual(far_apart_pairs(load_fixture("PATH3")), [("a", "b"), ("b", "c")])
        self.assertEqual(far_apart_pairs(load_fixture("EDGELESS(3)")), [])
        self.assertIn(("v0", "b1"), far_apart_pairs(load_fixture("FORK")))

    def test_far_apart_additive(self):
        g = load_fixture("SIMPLETREE")
        for u, v in far_apart_pairs(g):
            self.assertEqual(
                max_compatible(g, [u, v]).m_value,
                max_compatible(g, [u]).m_value + max_compatible(g, [v]).m_value,
                f"{u},{v}",
            )

    def test_far_apart_needs_connected_graph(self):
        g = load_fixture("EDGE_AND_POINTS")
        self.assertIn(("v", "a"), far_apart_pairs(g))
        self.assertEqual(max_compatible(g, ["v", "a"]).m_value, 3)
        self.assertLess(
            max_compatible(g, ["v", "a"]).m_value,
            max_compatible(g, ["v"]).m_value + max_compatible(g, ["a"]).m_value,
        )

    def test_gap_graphs_fail_condition(self):
        for name in ("FORK", "SIMPLETREE"):
            g = load_fixture(name)
            self.assertLess(max_compatible(g, "L").m_value, max_compatible(g, "V").m_value, name)
            self.assertFalse(condition_holds(g).holds, name)


class TestCliqueSearch(unittest.TestCase):
    def test_triangle_with_pendant(self):
        adjacency = [0b1110, 0b0101, 0b0011, 0b0001]
        self.assertEqual(CliqueSearch(adjacency).run(), [0, 1, 2])

    def test_budget(self):
        with self.assertRaises(SearchBudgetExceeded):
            CliqueSearch([0b10, 0b01], budget=1).run()

    def test_compatibility_graph(self):
        g = load_fixture("EDGELESS(3)")
        report = max_compatible(g, "V")
        graph = compatibility_graph(g, list(report.witness))
        self.assertEqual(graph.number_of_nodes(), 3)
        self.assertEqual(graph.number_of_edges(), 3)


class TestNormalizeClass(unittest.TestCase):
    def setUp(self):
        self.g = load_fixture("EDGELESS(3)")
        self.cls = relations(self.g).classes[0]

    def test_moves_onto_representative(self):
        pi = max_compatible(self.g, "V").witness
        result = normalize_class(self.g, pi, self.cls, "a")
        self.assertEqual(len(result), len(pi))
        self.assertTrue(result.is_pairwise_compatible(self.g))
        a_letters = self.g.letter_set("a a^-1")
        for part in result:
            self.assertTrue(part.bases & a_letters)

    def test_already_normal(self):
        pi = normalize_class(self.g, max_compatible(self.g, "V").witness, self.cls, "a")
        self.assertIs(normalize_class(self.g, pi, self.cls, "a"), pi)

    def test_not_maximal(self):
        part = make_partition(self.g, self.g.letter_set("a b"), "a")
        with self.assertRaises(CollectionError):
            normalize_class(self.g, make_collection([part]), self.cls, "a")

    def test_abelian_class_rejected(self):
        g = load_fixture("EDGE_AND_POINTS")
        cls = relations(g).class_of(g.vertex_index("v"))
        with self.assertRaises(CollectionError):
            normalize_class(g, max_compatible(g, "V").witness, cls, "v")


class TestCompleteAbelian(unittest.TestCase):
    def setUp(self):
        self.g = load_fixture("EDGE_AND_POINTS")
        self.v = self.g.letter("v")
        self.part = make_partition(self.g, self.g.letter_set("v a"), self.v)
        self.aut = WhiteheadAuto(self.part, self.v)

    def test_single_input(self):
        result = complete_abelian(self.g, [self.aut], ["v", "w"])
        self.assertEqual(result.completed[0], self.aut)
        self.assertIn(exchange(self.g, self.part, "v", "w"), {a.partition for a in result.completed})
        self.assertEqual(len(result.reduced) + len(result.eliminated), len(result.completed))
        self.assertEqual(len(result.reduced), max_compatible(self.g, ["v", "w"]).m_value)
        self.assertTrue(make_collection(a.partition for a in result.reduced).is_pairwise_compatible(self.g))
        for aut, decomposition in result.eliminated:
            self.assertEqual(decomposition.to_generator_map(self.g), to_generator_map(self.g, aut))

    def test_missing_exchanges(self):
        missing = missing_exchanges(self.g, [self.part])
        self.assertEqual(missing, [(self.part, self.g.vertex_index("w"))])
        moved = exchange(self.g, self.part, "v", "w")
        self.assertEqual(missing_exchanges(self.g, [self.part, moved]), [])

    def test_non_commuting_input(self):
        g = load_fixture("EDGELESS(2)")
        a1 = WhiteheadAuto(make_partition(g, g.letter_set("a b"), "a"), g.letter("a"))
        a2 = WhiteheadAuto(make_partition(g, g.letter_set("a^-1 b"), "b"), g.letter("b"))
        with self.assertRaises(CommutationError):
            complete_abelian(g, [a1, a2], ["a"])


class TestAbelianGenerators(unittest.TestCase):
    def test_fork(self):
        g = load_fixture("FORK")
        autos = build_abelian_generators(g)
        self.assertEqual(len(autos), 8)
        for a1, a2 in itertools.combinations(autos, 2):
            self.assertTrue(compatible(g, a1.partition, a2.partition))

    def test_edgeless_uses_one_multiplier(self):
        g = load_fixture("EDGELESS(3)")
        autos = build_abelian_generators(g)
        self.assertEqual(len(autos), 3)
        self.assertEqual({vertex_of(a.multiplier) for a in autos}, {g.vertex_index("a")})

    def test_triangle(self):
        self.assertEqual(build_abelian_generators(load_fixture("TRIANGLE")), [])

    def test_exponent_order(self):
        self.assertEqual(exponent_order(2), [0, 1, -1, 2, -2])

    def test_dependent_pair(self):
        g = load_fixture("EDGELESS(2)")
        aut = left_fold(g, "b", "a")
        verdict = verify_abelian_rank(g, [aut, invert(g, aut)], exponent_bound=1)
        self.assertFalse(verdict.passed)
        self.assertEqual(verdict.vector, (1, 1))

    def test_empty(self):
        self.assertTrue(verify_abelian_rank(load_fixture("EX1"), []).passed)

    @pytest.mark.slow
    def test_simple_tree_rank(self):
        g = load_fixture("SIMPLETREE")
        autos = build_abelian_generators(g)
        self.assertEqual(len(autos), 5)
        self.assertTrue(verify_abelian_rank(g, autos, exponent_bound=1, inner_bound=8).passed)


if __name__ == '__main__':
    unittest.main()
