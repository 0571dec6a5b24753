import unittest

import numpy as np

from raagspine.errors import NestError, PartitionError
from raagspine.fixtures import load_fixture
from raagspine.graph_core import inverse_letter
from raagspine.partitions import enumerate_partitions, make_partition, parse_partition
from raagspine.raag_words import format_word, parse_word
from raagspine.whitehead import (
    Innerness,
    WhiteheadAuto,
    abelian_action,
    compose,
    conjugation_map,
    decompose_in_nest,
    format_auto,
    generator_kind,
    identity_map,
    image_of_generator,
    invert,
    is_inner,
    left_fold,
    map_power,
    outer_commute_oracle,
    outer_commute_predicate,
    partial_conjugation,
    right_fold,
    to_generator_map,
)


def all_autos(g):
    return [
        WhiteheadAuto(part, m)
        for part in enumerate_partitions(g)
        for m in range(2 * g.n)
        if part.is_base(m)
    ]


class TestImages(unittest.TestCase):
    def setUp(self):
        self.g = load_fixture("EX1")
        part = make_partition(self.g, self.g.letter_set("m u v1 v1^-1 v2 v2^-1"), "m")
        self.aut = WhiteheadAuto(part, self.g.letter("m"))

    def image(self, v):
        return format_word(self.g, image_of_generator(self.g, self.aut, v))

    def test_four_cases(self):
        self.assertEqual(self.image("u"), "u m^-1")
        self.assertEqual(self.image("v1"), "m v1 m^-1")
        self.assertEqual(self.image("x1"), "x1")
        self.assertEqual(self.image("m"), "m")

    def test_left_fold_case(self):
        g = load_fixture("EDGELESS(2)")
        part = make_partition(g, g.letter_set("a b^-1"), "a")
        aut = WhiteheadAuto(part, g.letter("a"))
        self.assertEqual(format_word(g, image_of_generator(g, aut, "b")), "a b")
        self.assertEqual(generator_kind(g, aut, "b"), "left_fold")

    def test_kinds(self):
        kinds = {v: generator_kind(self.g, self.aut, v) for v in ("u", "v1", "x1", "m")}
        self.assertEqual(kinds, {"u": "right_fold", "v1": "partial_conjugation", "x1": "fixed", "m": "fixed"})

    def test_multiplier_must_be_base(self):
        with self.assertRaises(PartitionError):
            WhiteheadAuto(self.aut.partition, self.g.letter("u"))

    def test_format(self):
        self.assertTrue(format_auto(self.g, self.aut).startswith("phi({"))
        self.assertTrue(format_auto(self.g, self.aut).endswith(", m)"))


class TestIdentities(unittest.TestCase):
    def test_inverse_composes_to_identity(self):
        for name in ("EDGELESS(3)", "EX1", "DIAMONDS(1)", "SIMPLETREE"):
            g = load_fixture(name)
            for aut in all_autos(g):
                f = to_generator_map(g, aut)
                f_inv = to_generator_map(g, invert(g, aut))
                self.assertEqual(compose(g, f, f_inv), identity_map(g), format_auto(g, aut))
                self.assertEqual(compose(g, f_inv, f), identity_map(g), format_auto(g, aut))

    def test_opposite_side_differs_by_conjugation(self):
        for name in ("EDGELESS(3)", "EX1", "PATH3", "SIMPLETREE"):
            g = load_fixture(name)
            for aut in all_autos(g):
                m = aut.multiplier
                flipped = WhiteheadAuto(aut.partition, inverse_letter(m))
                expected = compose(g, conjugation_map(g, (m,)), to_generator_map(g, aut))
                self.assertEqual(to_generator_map(g, flipped), expected, format_auto(g, aut))

    def test_powers(self):
        g = load_fixture("EDGELESS(2)")
        aut = left_fold(g, "b", "a")
        self.assertEqual(map_power(g, aut, 0), identity_map(g))
        self.assertEqual(compose(g, map_power(g, aut, 3), map_power(g, aut, -3)), identity_map(g))
        self.assertEqual(format_word(g, map_power(g, aut, 2).images[1]), "a a b")


class TestFolds(unittest.TestCase):
    def setUp(self):
        self.g = load_fixture("EDGELESS(2)")

    def test_right_fold(self):
        f = to_generator_map(self.g, right_fold(self.g, "a", "b"))
        self.assertEqual(format_word(self.g, f.images[0]), "a b")
        self.assertEqual(format_word(self.g, f.images[1]), "b")

    def test_left_fold(self):
        f = to_generator_map(self.g, left_fold(self.g, "a", "b"))
        self.assertEqual(format_word(self.g, f.images[0]), "b a")

    def test_partial_conjugation(self):
        g = load_fixture("SIMPLETREE")
        f = to_generator_map(g, partial_conjugation(g, ["a1", "b1"], "v0"))
        self.assertEqual(format_word(g, f.images[g.vertex_index("a1")]), "v0 a1 v0^-1")
        self.assertEqual(format_word(g, f.images[g.vertex_index("b1")]), "v0 b1 v0^-1")
        self.assertEqual(format_word(g, f.images[g.vertex_index("a2")]), "a2")

    def test_abelian_action(self):
        fold = to_generator_map(self.g, left_fold(self.g, "b", "a"))
        np.testing.assert_array_equal(abelian_action(self.g, fold), np.array([[1, 1], [0, 1]]))
        g = load_fixture("SIMPLETREE")
        conj = to_generator_map(g, partial_conjugation(g, ["a1", "b1"], "v0"))
        np.testing.assert_array_equal(abelian_action(g, conj), np.eye(g.n, dtype=np.int64))


class TestInnerness(unittest.TestCase):
    def setUp(self):
        self.g = load_fixture("EDGELESS(2)")

    def test_identity(self):
        verdict = is_inner(self.g, identity_map(self.g))
        self.assertIs(verdict.status, Innerness.YES)
        self.assertEqual(verdict.conjugator, ())

    def test_conjugation(self):
        w = parse_word(self.g, "a")
        verdict = is_inner(self.g, conjugation_map(self.g, w))
        self.assertIs(verdict.status, Innerness.YES)
        self.assertEqual(verdict.conjugator, w)

    def test_longer_conjugator_found(self):
        g = load_fixture("PATH3")
        w = parse_word(g, "a c^-1 b")
        verdict = is_inner(g, conjugation_map(g, w))
        self.assertIs(verdict.status, Innerness.YES)
        self.assertEqual(conjugation_map(g, verdict.conjugator), conjugation_map(g, w))

    def test_fold_is_not_inner(self):
        f = to_generator_map(self.g, left_fold(self.g, "b", "a"))
        self.assertIs(is_inner(self.g, f).status, Innerness.NO)

    def test_bound_too_small(self):
        f = conjugation_map(self.g, parse_word(self.g, "a"))
        self.assertIs(is_inner(self.g, f, bound=0).status, Innerness.UNKNOWN)

    def test_partial_conjugation_is_not_inner(self):
        # every image is conjugate to its generator, but no single conjugator works
        g = load_fixture("EDGELESS(3)")
        f = to_generator_map(g, partial_conjugation(g, ["a"], "b"))
        self.assertIs(is_inner(g, f).status, Innerness.NO)
        self.assertIs(is_inner(g, f, bound=0).status, Innerness.NO)

    def test_shortest_conjugator(self):
        g = load_fixture("PATH3")
        w = parse_word(g, "a b c")
        verdict = is_inner(g, conjugation_map(g, w))
        self.assertIs(verdict.status, Innerness.YES)
        self.assertEqual(len(verdict.conjugator), 2)
        self.assertEqual(conjugation_map(g, verdict.conjugator), conjugation_map(g, w))

    def test_commutator_with_conjugate_images(self):
        g = load_fixture("EDGELESS(3)")
        a1 = WhiteheadAuto(parse_partition(g, "{a a^-1 b | b^-1 c c^-1 | }"), g.letter("b"))
        a2 = WhiteheadAuto(parse_partition(g, "{a a^-1 b c | b^-1 c^-1 | }"), g.letter("c"))
        f1, f2 = to_generator_map(g, a1), to_generator_map(g, a2)
        i1, i2 = to_generator_map(g, invert(g, a1)), to_generator_map(g, invert(g, a2))
        commutator = compose(g, compose(g, f1, f2), compose(g, i1, i2))
        self.assertIs(is_inner(g, commutator, bound=6).status, Innerness.NO)
        self.assertIs(outer_commute_oracle(g, a1, a2, 6), False)
        self.assertFalse(outer_commute_predicate(g, a1, a2))

    def test_oracle_always_decides(self):
        for name in ("EDGELESS(3)", "PATH3"):
            g = load_fixture(name)
            autos = all_autos(g)
            for i, a1 in enumerate(autos):
                for a2 in autos[i:]:
                    self.assertIsNotNone(outer_commute_oracle(g, a1, a2, 6), f"{format_auto(g, a1)} vs {format_auto(g, a2)}")


class TestCommutation(unittest.TestCase):
    def test_commuting_multipliers(self):
        g = load_fixture("DIAMONDS(1)")
        a1 = WhiteheadAuto(make_partition(g, g.letter_set("a1 b1"), "a1"), g.letter("a1"))
        a2 = WhiteheadAuto(make_partition(g, g.letter_set("c0 c1"), "c0"), g.letter("c0"))
        self.assertTrue(outer_commute_predicate(g, a1, a2))
        self.assertTrue(outer_commute_oracle(g, a1, a2))

    def test_nested_same_multiplier(self):
        g = load_fixture("EX1")
        m = g.letter("m")
        a1 = WhiteheadAuto(make_partition(g, g.letter_set("m u"), m), m)
        a2 = WhiteheadAuto(make_partition(g, g.letter_set("m u v1 v1^-1 v2 v2^-1"), m), m)
        self.assertTrue(outer_commute_predicate(g, a1, a2))
        self.assertTrue(outer_commute_oracle(g, a1, a2))

    def test_incompatible_pair(self):
        g = load_fixture("EDGELESS(2)")
        a1 = WhiteheadAuto(make_partition(g, g.letter_set("a b"), "a"), g.letter("a"))
        a2 = WhiteheadAuto(make_partition(g, g.letter_set("a^-1 b"), "b"), g.letter("b"))
        self.assertFalse(outer_commute_predicate(g, a1, a2))
        self.assertFalse(outer_commute_oracle(g, a1, a2))


class TestDecomposeInNest(unittest.TestCase):
    def setUp(self):
        self.g = load_fixture("EDGELESS(4)")
        self.a = self.g.letter("a")
        self.nest = [
            make_partition(self.g, self.g.letter_set("a b"), "a"),
            make_partition(self.g, self.g.letter_set("a b c"), "a"),
        ]

    def test_middle_step(self):
        q = make_partition(self.g, self.g.letter_set("a c"), "a")
        result = decompose_in_nest(self.g, q, self.nest, "a")
        self.assertEqual([e for _, e in result.factors], [-1, 1])
        self.assertEqual(result.conjugator, ())
        self.assertEqual(result.to_generator_map(self.g), to_generator_map(self.g, WhiteheadAuto(q, self.a)))

    def test_top_step_gives_conjugation(self):
        q = make_partition(self.g, self.g.letter_set("a b^-1 c^-1 d d^-1"), "a")
        result = decompose_in_nest(self.g, q, self.nest, "a")
        self.assertEqual(result.conjugator, (self.g.letter("a^-1"),))
        self.assertEqual([e for _, e in result.factors], [-1])

    def test_nest_member_itself(self):
        result = decompose_in_nest(self.g, self.nest[1], self.nest, "a")
        self.assertEqual(result.to_generator_map(self.g), to_generator_map(self.g, WhiteheadAuto(self.nest[1], self.a)))

    def test_cut_step(self):
        q = make_partition(self.g, self.g.letter_set("a b^-1"), "a")
        with self.assertRaises(NestError):
            decompose_in_nest(self.g, q, self.nest, "a")


if __name__ == '__main__':
    unittest.main()
