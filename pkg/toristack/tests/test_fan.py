import random
from itertools import combinations

from django.test import SimpleTestCase

from toristack.exceptions import TooManyRays
from toristack.fan import (
    Fan,
    ZeroPattern,
    admissible_patterns,
    is_admissible,
    minimal_inadmissible_patterns,
    validate_fan,
)

from .factories import p2_fan, random_complete_fan

INTERVAL = Fan(dim=1, rays=((1,), (-1,)), max_cones=({0}, {1}))


class TestZeroPattern(SimpleTestCase):
    def test_one_based_rendering(self):
        pattern = ZeroPattern.of(0, 2)
        self.assertEqual(str(pattern), "{1,3}")
        self.assertEqual(ZeroPattern.from_one_based([1, 3]), pattern)
        self.assertEqual(str(ZeroPattern()), "{}")


class TestValidateFan(SimpleTestCase):
    def test_p2_fan_is_complete_and_simplicial(self):
        self.assertTrue(validate_fan(p2_fan()).ok)

    def test_interval_fan(self):
        self.assertTrue(validate_fan(INTERVAL).ok)

    def test_single_quadrant_is_not_complete(self):
        fan = Fan(dim=2, rays=((1, 0), (0, 1)), max_cones=({0, 1},))
        self.assertEqual(validate_fan(fan).codes(), {"not_complete"})

    def test_dependent_rays_are_not_simplicial(self):
        fan = Fan(dim=2, rays=((1, 0), (2, 0)), max_cones=({0, 1},))
        self.assertIn("not_simplicial", validate_fan(fan).codes())

    def test_overlapping_cones(self):
        """Four rays, five cones: the cone {1,3} overlaps {1,2} and {2,3}."""
        fan = Fan(
            dim=2,
            rays=((1, 0), (1, 1), (0, 1), (-1, -1)),
            max_cones=({0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}),
        )
        self.assertIn("improper_intersection", validate_fan(fan).codes())

    def test_invalid_cone_index(self):
        fan = Fan(dim=1, rays=((1,), (-1,)), max_cones=({0}, {5}))
        self.assertEqual(validate_fan(fan).codes(), {"invalid_cone"})

    def test_completeness_above_the_checked_dimension(self):
        """The cube fan in dimension 4 needs an explicit assertion."""
        rays = []
        for axis in range(4):
            for sign in (1, -1):
                ray = [0] * 4
                ray[axis] = sign
                rays.append(tuple(ray))
        cones = [
            frozenset(2 * axis + choice[axis] for axis in range(4))
            for choice in (
                [(mask >> axis) & 1 for axis in range(4)] for mask in range(16)
            )
        ]
        fan = Fan(dim=4, rays=tuple(rays), max_cones=tuple(cones))

        report = validate_fan(fan)
        self.assertEqual(report.codes(), {"completeness_unchecked"})
        asserted = validate_fan(fan, assume_complete=True)
        self.assertTrue(asserted.ok)
        self.assertEqual(len(asserted.notes), 1)
        self.assertTrue(validate_fan(fan, completeness_max_dim=4).ok)

    def test_ray_outside_every_cone(self):
        """A vector in no maximal cone is not a ray of the fan."""
        fan = Fan(
            dim=2,
            rays=((1, 0), (0, 1), (-1, -1), (1, 1)),
            max_cones=({0, 1}, {1, 2}, {0, 2}),
        )
        report = validate_fan(fan)
        self.assertEqual(report.codes(), {"unused_ray"})
        self.assertIn("Ray 4", report.diagnostics[0].message)

    def test_random_fans_are_valid(self):
        rng = random.Random(3)
        for dim in (1, 2, 3):
            for _ in range(10):
                fan = random_complete_fan(rng, dim=dim, max_rays=8)
                self.assertTrue(validate_fan(fan).ok, fan)


class TestPatterns(SimpleTestCase):
    def test_admissibility(self):
        fan = p2_fan()
        self.assertTrue(is_admissible(fan, ZeroPattern.of(0, 1)))
        self.assertTrue(is_admissible(fan, ZeroPattern()))
        self.assertFalse(is_admissible(fan, ZeroPattern.of(0, 1, 2)))

    def test_p2_patterns(self):
        patterns = [p.one_based() for p in admissible_patterns(p2_fan())]
        self.assertEqual(
            patterns, [[], [1], [2], [3], [1, 2], [1, 3], [2, 3]]
        )
        self.assertEqual(
            minimal_inadmissible_patterns(p2_fan()), [ZeroPattern.of(0, 1, 2)]
        )

    def test_interval_patterns(self):
        self.assertEqual(
            admissible_patterns(INTERVAL),
            [ZeroPattern(), ZeroPattern.of(0), ZeroPattern.of(1)],
        )
        self.assertEqual(
            minimal_inadmissible_patterns(INTERVAL), [ZeroPattern.of(0, 1)]
        )

    def test_single_cone_gives_the_powerset(self):
        fan = Fan(dim=3, rays=((1, 0, 0), (0, 1, 0), (0, 0, 1)), max_cones=({0, 1, 2},))
        self.assertEqual(len(admissible_patterns(fan)), 8)
        self.assertEqual(minimal_inadmissible_patterns(fan), [])

    def test_enumeration_matches_membership(self):
        rng = random.Random(5)
        for _ in range(10):
            fan = random_complete_fan(rng)
            listed = set(admissible_patterns(fan))
            for size in range(fan.m + 1):
                for subset in combinations(range(fan.m), size):
                    pattern = ZeroPattern(frozenset(subset))
                    self.assertEqual(is_admissible(fan, pattern), pattern in listed)

    def test_minimal_inadmissible_patterns_are_minimal(self):
        rng = random.Random(6)
        fan = random_complete_fan(rng, min_rays=5)
        for pattern in minimal_inadmissible_patterns(fan):
            self.assertFalse(is_admissible(fan, pattern))
            for j in pattern.indices:
                self.assertTrue(
                    is_admissible(fan, ZeroPattern(pattern.indices - {j}))
                )

    def test_admissibility_is_closed_under_subsets(self):
        rng = random.Random(9)
        for dim in (1, 2, 3):
            fan = random_complete_fan(rng, dim=dim, max_rays=8)
            for pattern in admissible_patterns(fan):
                for j in pattern.indices:
                    smaller = ZeroPattern(pattern.indices - {j})
                    self.assertTrue(is_admissible(fan, smaller))

    def test_enumeration_bound(self):
        with self.assertRaises(TooManyRays):
            admissible_patterns(p2_fan(), max_rays=2)
