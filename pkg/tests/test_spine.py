import unittest
from unittest import mock

import pytest
from loguru import logger

from raagspine.errors import CollectionError, SearchBudgetExceeded
from raagspine.fixtures import load_fixture
from raagspine.graph_core import popcount
from raagspine.partitions import make_partition
from raagspine.rank_search import make_collection, max_compatible
from raagspine.spine import (
    SPINE_MODE,
    Cube,
    build_star,
    collapse_is_equivariant,
    collapse_pass,
    constructive_irreplaceable,
    cube_census,
    find_irreplaceable,
    hasse_diagram,
    innermost_nonprincipal_sides,
    is_irreplaceable,
    is_principal_partition,
    is_sandwiched,
    symmetry_generators,
    to_dot,
    top_collections,
)


class TestStar(unittest.TestCase):
    def test_edgeless_pair(self):
        star = build_star(load_fixture("EDGELESS(2)"))
        self.assertEqual(len(star.partitions), 2)
        self.assertEqual(star.collections, (0, 0b01, 0b10))
        self.assertEqual(star.top_dimension, 1)
        census = cube_census(star)
        self.assertEqual(census.counts, (3, 2))
        self.assertEqual((census.vertices, census.edges), (3, 2))

    def test_triangle_is_a_point(self):
        star = build_star(load_fixture("TRIANGLE"))
        self.assertEqual(star.collections, (0,))
        self.assertEqual(cube_census(star).counts, (1,))

    def test_top_dimension_is_max_compatible(self):
        self.assertEqual(build_star(load_fixture("EDGELESS(3)")).top_dimension, 3)
        self.assertEqual(build_star(load_fixture("SIMPLETREE")).top_dimension, 6)

    def test_collections_closed_under_subsets(self):
        star = build_star(load_fixture("EX1"))
        present = set(star.collections)
        for c in star.collections:
            for i in range(len(star.partitions)):
                if c >> i & 1:
                    self.assertIn(c & ~(1 << i), present)

    def test_budget(self):
        with self.assertRaises(SearchBudgetExceeded):
            build_star(load_fixture("EDGELESS(3)"), budget=2)

    def test_hasse_and_dot(self):
        g = load_fixture("EDGELESS(2)")
        star = build_star(g)
        self.assertEqual(hasse_diagram(star).number_of_nodes(), 3)
        dot = to_dot(g, star)
        self.assertIn("digraph", dot)
        self.assertIn("empty", dot)
        self.assertEqual(dot.count("->"), 2)

    def test_cube(self):
        g = load_fixture("EDGELESS(3)")
        star = build_star(g)
        top = star.collection(star.of_size(3)[0])
        cube = Cube(make_collection([], top.mode), top)
        self.assertEqual(cube.dimension, 3)
        with self.assertRaises(CollectionError):
            Cube(top, make_collection([], top.mode))


class TestSandwiched(unittest.TestCase):
    def setUp(self):
        self.g = load_fixture("SIMPLETREE")
        g = self.g
        self.q = make_partition(g, g.letter_set("v0 a1 a1^-1 b1 b1^-1"), "v0")
        self.left = make_partition(g, g.letter_set("a1 v0"), "a1")
        self.right = make_partition(g, g.letter_set("a2^-1 v0^-1"), "a2^-1")

    def test_flanked_on_both_sides(self):
        verdict = is_sandwiched(self.g, self.q, [self.q, self.left, self.right])
        self.assertTrue(verdict.holds)
        self.assertEqual(verdict.witness, ("a1^-1", "a2"))

    def test_one_flank_missing(self):
        self.assertFalse(is_sandwiched(self.g, self.q, [self.q, self.left]).holds)
        self.assertFalse(is_sandwiched(self.g, self.q, [self.q]).holds)

    def test_errors(self):
        with self.assertRaises(CollectionError):
            is_sandwiched(self.g, self.q, [self.left])
        with self.assertRaises(CollectionError):
            is_sandwiched(self.g, self.left, [self.q, self.left])

    def test_principal(self):
        self.assertFalse(is_principal_partition(self.g, self.q))
        self.assertTrue(is_principal_partition(self.g, self.left))

    def test_innermost_sides(self):
        innermost = innermost_nonprincipal_sides(self.g, [self.q, self.left, self.right])
        self.assertEqual([side for side, _ in innermost], [self.q.side_p, self.q.side_q])

    def test_irreplaceable_needs_maximum(self):
        with self.assertRaises(CollectionError):
            is_irreplaceable(self.g, self.q, [self.q, self.left, self.right])


class TestCollapse(unittest.TestCase):
    def test_top_collections_have_irreplaceable_members(self):
        g = load_fixture("SIMPLETREE")
        for collection in top_collections(build_star(g)):
            members = list(collection)
            q = find_irreplaceable(g, members)
            self.assertIn(q, members)
            self.assertFalse(is_principal_partition(g, q))
            self.assertTrue(is_irreplaceable(g, q, members))

    def test_replacement_loop_settles(self):
        g = load_fixture("SIMPLETREE")
        for collection in top_collections(build_star(g)):
            members = list(collection)
            q = constructive_irreplaceable(g, members)
            self.assertIsNotNone(q)
            self.assertTrue(is_irreplaceable(g, q, members))

    @pytest.mark.slow
    def test_replacement_loop_settles_on_fork(self):
        g = load_fixture("FORK")
        members = list(max_compatible(g, "V", SPINE_MODE).witness)
        q = constructive_irreplaceable(g, members)
        self.assertIsNotNone(q)
        self.assertFalse(is_principal_partition(g, q))
        self.assertTrue(is_irreplaceable(g, q, members))

    @pytest.mark.slow
    def test_sandwiched_members_are_irreplaceable(self):
        g = load_fixture("FORK")
        members = list(max_compatible(g, "V", SPINE_MODE).witness)
        sandwiched = [q for q in members if not is_principal_partition(g, q) and is_sandwiched(g, q, members).holds]
        self.assertTrue(sandwiched)
        for q in sandwiched:
            self.assertTrue(is_irreplaceable(g, q, members))

    def test_fallback_scan_is_logged(self):
        g = load_fixture("SIMPLETREE")
        members = list(top_collections(build_star(g))[0])
        messages = []
        handler_id = logger.add(messages.append, level="WARNING")
        try:
            with mock.patch("raagspine.spine.constructive_irreplaceable", return_value=None):
                q = find_irreplaceable(g, members)
        finally:
            logger.remove(handler_id)
        self.assertTrue(is_irreplaceable(g, q, members))
        self.assertTrue(any("did not settle" in str(m) for m in messages))

    @pytest.mark.slow
    def test_simple_tree(self):
        g = load_fixture("SIMPLETREE")
        report = collapse_pass(g)
        self.assertEqual(report.top_dimension, 6)
        self.assertEqual(report.residual_dimension, 5)
        tops = report.star.of_size(6)
        self.assertEqual(len(report.removed_pairs), len(tops))
        for (face, top), q in zip(report.removed_pairs, report.free_partitions):
            self.assertEqual(top & ~face, 1 << q)
            self.assertEqual(popcount(face), 5)
        if report.equivariant_choice:
            self.assertTrue(collapse_is_equivariant(g, report))

    def test_not_barbed(self):
        with self.assertRaises(CollectionError):
            collapse_pass(load_fixture("NONBARBED"))

    def test_no_gap(self):
        with self.assertRaises(CollectionError):
            collapse_pass(load_fixture("EDGELESS(3)"))

    def test_symmetry_generators(self):
        gens = symmetry_generators(load_fixture("EDGELESS(2)"))
        self.assertEqual(gens, [((1, 0), 0), ((0, 1), 1), ((0, 1), 2)])


if __name__ == '__main__':
    unittest.main()
