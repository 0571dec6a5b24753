"""
Published values and proven identities, checked through the verify suite.

The quick checks run by default; the rest carry the ``slow`` marker.
"""

import unittest

import pytest

from raagspine.errors import RaagSpineError
from raagspine.verify import (
    CHECKS,
    check_abelian_subgroup,
    check_closed_form,
    check_collapse,
    check_commute_oracle,
    check_diamonds,
    check_far_apart,
    check_fork,
    check_condition,
    check_free_group_rank,
    check_inseparable_sets,
    check_simple_tree,
    check_weak_equals_strong,
    check_whitehead_identities,
    checks_for,
    run_suite,
    summary,
)

SEED = 0


class TestQuickChecks(unittest.TestCase):
    def assertCheck(self, check):
        passed, detail = check(SEED)
        self.assertTrue(passed, detail)

    def test_inseparable_sets(self):
        self.assertCheck(check_inseparable_sets)

    def test_free_group_rank(self):
        self.assertCheck(check_free_group_rank)

    def test_fork(self):
        self.assertCheck(check_fork)

    def test_simple_tree(self):
        self.assertCheck(check_simple_tree)

    def test_whitehead_identities(self):
        self.assertCheck(check_whitehead_identities)

    def test_closed_form(self):
        self.assertCheck(check_closed_form)


@pytest.mark.slow
class TestSlowChecks(unittest.TestCase):
    def assertCheck(self, check):
        passed, detail = check(SEED)
        self.assertTrue(passed, detail)

    def test_diamonds(self):
        self.assertCheck(check_diamonds)

    def test_commute_oracle(self):
        self.assertCheck(check_commute_oracle)

    def test_weak_equals_strong(self):
        self.assertCheck(check_weak_equals_strong)

    def test_far_apart(self):
        self.assertCheck(check_far_apart)

    def test_condition(self):
        self.assertCheck(check_condition)

    def test_abelian_subgroup(self):
        self.assertCheck(check_abelian_subgroup)

    def test_collapse(self):
        self.assertCheck(check_collapse)


class TestRunner(unittest.TestCase):
    def test_suites(self):
        self.assertEqual(len(checks_for("full")), len(CHECKS))
        quick = checks_for("quick")
        self.assertTrue(all(c.quick for c in quick))
        self.assertEqual([c.name for c in quick][:2], ["inseparable_sets", "free_group_rank"])

    def test_unknown_suite(self):
        with self.assertRaises(RaagSpineError):
            checks_for("everything")

    def test_quick_suite_passes(self):
        results = run_suite("quick", SEED, progress=False)
        counts = summary(results)
        self.assertEqual(counts["failed"], 0, [r.detail for r in results if not r.passed])
        self.assertEqual(counts["total"], len(checks_for("quick")))


if __name__ == '__main__':
    unittest.main()
