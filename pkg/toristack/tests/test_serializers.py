import json

import sympy
from django.test import SimpleTestCase
from rest_framework import serializers

from toristack.exceptions import (
    ExactnessError,
    ParseError,
    SchemaError,
    ValidationFailed,
)
from toristack.inputs import bundled_names, conehead, load_bundled
from toristack.reports import (
    parse_input,
    parse_report,
    render_json,
    render_text,
    run_command,
)
from toristack.serializers import RationalField, StrictIntegerField

FLOAT_DOCUMENT = """{
  "kind": "polytope",
  "dim": 1,
  "facets": [
    {"normal": [1], "eta": 0.5, "label": 1},
    {"normal": [-1], "eta": "1", "label": 1}
  ]
}
"""

P2_FAN_WITHOUT_ETA = {
    "kind": "stacky_fan",
    "name": "p2_fan",
    "dim": 2,
    "rays": [[1, 0], [0, 1], [-1, -1]],
    "max_cones": [[1, 2], [2, 3], [1, 3]],
    "labels": [1, 1, 2],
}

UNBOUNDED = {
    "kind": "polytope",
    "dim": 2,
    "facets": [
        {"normal": [1, 0], "eta": "0"},
        {"normal": [0, 1], "eta": "0"},
    ],
}


def polytope_document(eta):
    return json.dumps(
        {
            "kind": "polytope",
            "dim": 1,
            "facets": [
                {"normal": [1], "eta": eta},
                {"normal": [-1], "eta": "1"},
            ],
        }
    )


class TestFields(SimpleTestCase):
    def assertFailsWith(self, field, value, code):
        with self.assertRaises(serializers.ValidationError) as ctx:
            field.run_validation(value)
        self.assertEqual(ctx.exception.get_codes(), [code])

    def test_strict_integer(self):
        field = StrictIntegerField()
        self.assertEqual(field.run_validation(7), 7)
        self.assertEqual(field.run_validation("-3"), -3)
        self.assertFailsWith(field, 2.0, "inexact")
        self.assertFailsWith(field, "2.0", "inexact")
        self.assertFailsWith(field, True, "invalid")

    def test_rational(self):
        field = RationalField()
        self.assertEqual(field.run_validation("3/4"), sympy.Rational(3, 4))
        self.assertEqual(field.run_validation(-2), -2)
        self.assertEqual(field.to_representation(sympy.Rational(6, 4)), "3/2")
        self.assertFailsWith(field, 0.25, "inexact")
        self.assertFailsWith(field, "1e-3", "inexact")
        self.assertFailsWith(field, "1/0", "zero_denominator")
        self.assertFailsWith(field, "half", "invalid")


class TestBundledInputs(SimpleTestCase):
    def test_names(self):
        self.assertEqual(
            bundled_names(),
            ["interval_unlabelled", "p2_labels_1_1_2", "p2_labels_2_2_2", "wp112"],
        )
        self.assertIsNone(load_bundled("missing"))
        self.assertEqual(load_bundled("conehead_4"), conehead(4))

    def test_every_bundled_input_parses(self):
        for name in bundled_names():
            document = parse_input(load_bundled(name))
            self.assertEqual(document.name, name)


class TestParseInput(SimpleTestCase):
    def test_bundled_polytope(self):
        document = parse_input(load_bundled("p2_labels_1_1_2"))
        self.assertEqual(document.kind, "polytope")
        self.assertEqual(document.polytope.labels, (1, 1, 2))
        self.assertEqual(document.polytope.eta, (0, 0, 1))
        self.assertIsNone(document.stacky_fan)

    def test_stacky_fan(self):
        document = parse_input(json.dumps(P2_FAN_WITHOUT_ETA))
        stacky_fan = document.stacky_fan
        self.assertEqual(stacky_fan.fan.rays, ((1, 0), (0, 1), (-1, -1)))
        self.assertIn(frozenset({0, 2}), stacky_fan.fan.max_cones)
        self.assertIsNone(stacky_fan.eta)

    def test_rational_strings_are_exact(self):
        document = parse_input(polytope_document("1/2"))
        self.assertEqual(document.polytope.eta[0], sympy.Rational(1, 2))

    def test_empty_document(self):
        with self.assertRaises(SchemaError):
            parse_input("  \n")

    def test_malformed_json(self):
        with self.assertRaises(ParseError) as ctx:
            parse_input('{\n  "kind": \n')
        self.assertEqual(ctx.exception.line, 3)
        self.assertEqual(ctx.exception.code, "parse_error")

    def test_not_an_object(self):
        with self.assertRaises(SchemaError):
            parse_input("[1, 2]")

    def test_float_literal_is_located(self):
        with self.assertRaises(ExactnessError) as ctx:
            parse_input(FLOAT_DOCUMENT)
        self.assertEqual((ctx.exception.line, ctx.exception.column), (5, 28))
        self.assertIn("line 5, column 28", ctx.exception.detail)

    def test_decimal_string_is_rejected(self):
        with self.assertRaises(ExactnessError):
            parse_input(polytope_document("0.5"))

    def test_missing_dimension(self):
        data = dict(UNBOUNDED)
        del data["dim"]
        with self.assertRaises(SchemaError) as ctx:
            parse_input(json.dumps(data))
        self.assertIn("dim", ctx.exception.errors)

    def test_fan_fields_on_a_polytope(self):
        data = {**UNBOUNDED, "rays": [[1, 0]]}
        with self.assertRaises(SchemaError) as ctx:
            parse_input(json.dumps(data))
        self.assertIn("rays", ctx.exception.errors)

    def test_cone_index_out_of_range(self):
        data = {**P2_FAN_WITHOUT_ETA, "max_cones": [[1, 4]]}
        with self.assertRaises(SchemaError) as ctx:
            parse_input(json.dumps(data))
        self.assertIn("max_cones", ctx.exception.errors)


class TestRunCommand(SimpleTestCase):
    def test_groups_on_weighted_projective_plane(self):
        report = run_command("groups", parse_input(load_bundled("wp112")))
        self.assertTrue(report.passed)
        self.assertEqual(report.sections["H"]["exponents"], [[1], [2], [1]])
        self.assertTrue(report.sections["presentations_agree"])

    def test_validate_reports_failures(self):
        report = run_command("validate", parse_input(json.dumps(UNBOUNDED)))
        self.assertFalse(report.passed)
        codes = {d["code"] for d in report.sections["polytope"]["diagnostics"]}
        self.assertEqual(codes, {"unbounded"})

    def test_later_stages_refuse_invalid_input(self):
        document = parse_input(json.dumps(UNBOUNDED))
        for command in ("fan", "certify"):
            with self.assertRaises(ValidationFailed):
                run_command(command, document)

    def test_moment_needs_support_numbers(self):
        document = parse_input(json.dumps(P2_FAN_WITHOUT_ETA))
        with self.assertRaises(SchemaError):
            run_command("moment", document)
        self.assertTrue(run_command("groups", document).passed)

    def test_moment_notes(self):
        report = run_command("moment", parse_input(load_bundled("wp112")))
        self.assertTrue(report.passed)
        self.assertEqual(len(report.notes), 1)

    def test_unknown_command(self):
        with self.assertRaises(ValueError):
            run_command("quantize", parse_input(load_bundled("wp112")))


class TestRendering(SimpleTestCase):
    def test_json_is_canonical(self):
        document = parse_input(load_bundled("p2_labels_2_2_2"))
        first = render_json(run_command("charts", document))
        second = render_json(run_command("charts", document))
        self.assertEqual(first, second)
        data = json.loads(first)
        self.assertEqual(list(data), sorted(data))
        self.assertTrue(first.endswith("}\n"))

    def test_report_reads_back(self):
        document = parse_input(load_bundled("wp112"))
        text = render_json(run_command("isotropy", document))
        self.assertEqual(render_json(parse_report(text)), text)

    def test_bad_report(self):
        text = json.dumps(
            {"command": "nope", "passed": True, "input": {}, "sections": {}, "notes": []}
        )
        with self.assertRaises(SchemaError):
            parse_report(text)

    def test_text_report(self):
        report = run_command("validate", parse_input(load_bundled("p2_labels_1_1_2")))
        text = render_text(report)
        self.assertTrue(text.startswith("toristack validate: p2_labels_1_1_2\n"))
        self.assertIn("status: PASS", text)
        self.assertIn("[polytope]", text)
        self.assertIn("smooth: yes", text)
