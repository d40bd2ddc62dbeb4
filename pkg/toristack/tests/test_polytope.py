import random

import sympy
from django.test import SimpleTestCase

from toristack.exceptions import DegeneratePolytope, NonSimpleVertex
from toristack.fan import validate_fan
from toristack.polytope import (
    LabelledPolytope,
    enumerate_vertices,
    is_smooth,
    normal_fan,
    validate_polytope,
)

from .factories import (
    conehead,
    cube,
    p2,
    prism,
    random_offset,
    random_polygon,
    tetrahedron,
    unit_square,
    wp112,
)


def points(vertices):
    return sorted(v.point for v in vertices)


def valid_polygons(rng: random.Random, count: int, max_label: int = 1):
    polygons = []
    while len(polygons) < count:
        polygon = random_polygon(rng, max_label)
        if validate_polytope(polygon).ok:
            polygons.append(polygon)
    return polygons


class TestValidatePolytope(SimpleTestCase):
    def test_p2_data_is_valid(self):
        report = validate_polytope(p2())
        self.assertTrue(report.ok, report.diagnostics)

    def test_two_facets_are_unbounded(self):
        polytope = LabelledPolytope.from_data([(1, 0), (0, 1)], [0, 0])
        report = validate_polytope(polytope)
        self.assertFalse(report.ok)
        self.assertEqual(report.codes(), {"unbounded"})

    def test_non_primitive_normal_is_flagged(self):
        polytope = LabelledPolytope.from_data(
            [(1, 0), (0, 1), (-2, -2)], [0, 0, 2]
        )
        self.assertIn("non_primitive_normal", validate_polytope(polytope).codes())

    def test_empty_polytope(self):
        """x ≥ 1 and x ≤ 0."""
        polytope = LabelledPolytope.from_data([(1,), (-1,)], [-1, 0])
        self.assertEqual(validate_polytope(polytope).codes(), {"empty"})

    def test_flat_polytope(self):
        polytope = LabelledPolytope.from_data([(1,), (-1,)], [0, 0])
        self.assertEqual(
            validate_polytope(polytope).codes(), {"not_full_dimensional"}
        )

    def test_redundant_facet(self):
        polytope = LabelledPolytope.from_data(
            [(1, 0), (0, 1), (-1, -1), (-1, 0)], [0, 0, 1, 5]
        )
        report = validate_polytope(polytope)
        self.assertEqual(report.codes(), {"redundant_facet"})
        self.assertIn("Facet 4", report.diagnostics[0].message)

    def test_labels_and_dimensions(self):
        polytope = LabelledPolytope.from_data(
            [(1, 0), (0, 1), (-1, -1)], [0, 0, 1], [1, 0, 1]
        )
        self.assertIn("invalid_label", validate_polytope(polytope).codes())
        bad = LabelledPolytope.from_data([(1, 0), (0,)], [0, 0], dim=2)
        self.assertEqual(validate_polytope(bad).codes(), {"dimension_mismatch"})


class TestEnumerateVertices(SimpleTestCase):
    def test_worked_examples(self):
        self.assertEqual(points(enumerate_vertices(p2())), [(0, 0), (0, 1), (1, 0)])
        self.assertEqual(
            points(enumerate_vertices(wp112())), [(0, 0), (0, 1), (2, 0)]
        )
        self.assertEqual(points(enumerate_vertices(conehead(3))), [(0,), (1,)])

    def test_active_facets_hold_with_equality(self):
        rng = random.Random(11)
        for _ in range(10):
            polytope = wp112().translated(random_offset(rng, 2))
            for vertex in enumerate_vertices(polytope):
                for j in vertex.active_facets:
                    self.assertEqual(
                        polytope.facets[j].half_space.slack(vertex.point), 0
                    )
                for facet in polytope.facets:
                    self.assertGreaterEqual(facet.half_space.slack(vertex.point), 0)

    def test_rational_vertices(self):
        polytope = LabelledPolytope.from_data(
            [(1, 0), (0, 1), (-1, -2)], [0, 0, sympy.Rational(1, 2)]
        )
        self.assertIn(
            (0, sympy.Rational(1, 4)), points(enumerate_vertices(polytope))
        )

    def test_unbounded_raises(self):
        with self.assertRaises(DegeneratePolytope):
            enumerate_vertices(LabelledPolytope.from_data([(1,)], [0]))

    def test_polygons_have_as_many_vertices_as_edges(self):
        for polygon in valid_polygons(random.Random(41), 25):
            vertices = enumerate_vertices(polygon)
            self.assertEqual(len(vertices), polygon.m, polygon.normals)
            self.assertTrue(all(len(v.active_facets) == 2 for v in vertices))


class TestIsSmooth(SimpleTestCase):
    def test_labels_do_not_matter(self):
        rng = random.Random(43)
        polytopes = [p2(), wp112(), cube(), *valid_polygons(rng, 15)]
        for polytope in polytopes:
            smooth, offending = is_smooth(polytope)
            labels = [rng.randint(1, 5) for _ in range(polytope.m)]
            relabelled_smooth, relabelled_offending = is_smooth(
                polytope.relabelled(labels)
            )
            self.assertEqual(relabelled_smooth, smooth)
            self.assertEqual(relabelled_offending, offending)

    def test_smooth_examples(self):
        self.assertTrue(is_smooth(p2())[0])
        self.assertTrue(is_smooth(unit_square())[0])

    def test_weighted_projective_plane(self):
        smooth, offending = is_smooth(wp112())
        self.assertFalse(smooth)
        self.assertEqual([v.point for v in offending], [(0, 1)])
        self.assertEqual(offending[0].active_facets, frozenset({0, 2}))


class TestNormalFan(SimpleTestCase):
    def test_p2(self):
        stacky_fan = normal_fan(p2())
        self.assertEqual(stacky_fan.fan.rays, ((1, 0), (0, 1), (-1, -1)))
        self.assertEqual(
            set(stacky_fan.fan.max_cones),
            {frozenset({0, 1}), frozenset({1, 2}), frozenset({0, 2})},
        )
        self.assertEqual(stacky_fan.labels, (1, 1, 2))
        self.assertEqual(stacky_fan.eta, (0, 0, 1))

    def test_interval(self):
        stacky_fan = normal_fan(conehead(1))
        self.assertEqual(stacky_fan.fan.rays, ((1,), (-1,)))
        self.assertEqual(
            set(stacky_fan.fan.max_cones), {frozenset({0}), frozenset({1})}
        )

    def test_non_simple_vertex(self):
        """The apex of a square pyramid lies on four facets."""
        pyramid = LabelledPolytope.from_data(
            [(0, 0, 1), (1, 0, -1), (-1, 0, -1), (0, 1, -1), (0, -1, -1)],
            [0, 1, 1, 1, 1],
        )
        with self.assertRaises(NonSimpleVertex):
            normal_fan(pyramid)

    def test_translation_changes_only_the_support_numbers(self):
        moved = p2().translated([2, -1])
        self.assertEqual(moved.eta, (-2, 1, 2))
        self.assertEqual(normal_fan(moved).fan, normal_fan(p2()).fan)

    def test_normal_fans_of_simple_polytopes_are_valid(self):
        rng = random.Random(47)
        polytopes = [cube(), tetrahedron(), prism(), *valid_polygons(rng, 20, 3)]
        for polytope in polytopes:
            fan = normal_fan(polytope).fan
            report = validate_fan(fan)
            self.assertTrue(report.ok, (polytope.normals, report.diagnostics))
            self.assertEqual(len(fan.max_cones), len(enumerate_vertices(polytope)))
