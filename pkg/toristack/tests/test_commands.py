import json
from io import StringIO
from unittest.mock import patch

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from toristack.management.commands.toristack import (
    CHECK_FAILED,
    INPUT_ERROR,
    Command,
)
from toristack.reports import run_command

UNBOUNDED = json.dumps(
    {
        "kind": "polytope",
        "dim": 2,
        "facets": [
            {"normal": [1, 0], "eta": "0"},
            {"normal": [0, 1], "eta": "0"},
        ],
    }
)

FAN_WITHOUT_ETA = json.dumps(
    {
        "kind": "stacky_fan",
        "dim": 2,
        "rays": [[1, 0], [0, 1], [-1, -1]],
        "max_cones": [[1, 2], [2, 3], [1, 3]],
    }
)


class TestToristackCommand(SimpleTestCase):
    """Exit statuses and output of ``manage.py toristack``."""

    def run_toristack(self, *args):
        out = StringIO()
        call_command("toristack", *args, stdout=out, stderr=StringIO())
        return out.getvalue()

    def test_certify_bundled_input(self):
        """A worked example certifies and exits cleanly."""
        data = json.loads(self.run_toristack("certify", "p2_labels_1_1_2", "--json"))
        self.assertTrue(data["passed"])
        self.assertTrue(data["sections"]["certificate"]["verdict"])
        self.assertEqual(data["input"]["name"], "p2_labels_1_1_2")

    def test_generated_conehead(self):
        data = json.loads(self.run_toristack("isotropy", "conehead_3", "--json"))
        groups = {
            tuple(entry["pattern"]): entry["group"]["torsion"]
            for entry in data["sections"]["isotropy"]
        }
        self.assertEqual(groups[(1,)], [3])

    def test_text_output(self):
        out = self.run_toristack("fan", "wp112")
        self.assertIn("toristack fan: wp112", out)
        self.assertIn("status: PASS", out)
        self.assertIn("[stacky_fan]", out)

    def test_level_convention_option(self):
        data = json.loads(
            self.run_toristack(
                "moment", "p2_labels_1_1_2", "--json", "--level-convention", "divided"
            )
        )
        moment = data["sections"]["moment"]
        self.assertEqual(moment["convention"], "divided")
        self.assertEqual(moment["xi"], ["1/2"])

    def test_unknown_input_name(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_toristack("validate", "no_such_input")
        self.assertEqual(ctx.exception.returncode, INPUT_ERROR)
        self.assertIn("wp112", str(ctx.exception))

    @patch.object(Command, "read_input", return_value=UNBOUNDED)
    def test_failed_validation_exits_with_check_status(self, _):
        """The report is still written before the command fails."""
        out = StringIO()
        with self.assertLogs("toristack", "WARNING"), self.assertRaises(
            CommandError
        ) as ctx:
            call_command("toristack", "validate", "unbounded", stdout=out)
        self.assertEqual(ctx.exception.returncode, CHECK_FAILED)
        self.assertIn("status: FAIL", out.getvalue())

    @patch.object(Command, "read_input", return_value=UNBOUNDED)
    def test_invalid_input_stops_certify(self, _):
        with self.assertRaises(CommandError) as ctx:
            self.run_toristack("certify", "unbounded")
        self.assertEqual(ctx.exception.returncode, CHECK_FAILED)
        self.assertIn("[validation_failed]", str(ctx.exception))

    @patch.object(Command, "read_input", return_value="{")
    def test_malformed_json(self, _):
        with self.assertRaises(CommandError) as ctx:
            self.run_toristack("validate", "broken")
        self.assertEqual(ctx.exception.returncode, INPUT_ERROR)
        self.assertIn("[parse_error]", str(ctx.exception))

    @patch.object(Command, "read_input", return_value=FAN_WITHOUT_ETA)
    def test_moment_without_support_numbers(self, _):
        with self.assertRaises(CommandError) as ctx:
            self.run_toristack("moment", "fan")
        self.assertEqual(ctx.exception.returncode, INPUT_ERROR)
        self.assertIn("[schema_error]", str(ctx.exception))

    def test_non_positive_jobs(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_toristack("certify", "wp112", "--jobs", "0")
        self.assertEqual(ctx.exception.returncode, INPUT_ERROR)

    @override_settings(
        TORISTACK={
            "MAX_RAYS": 12,
            "JOBS": 3,
            "LEVEL_CONVENTION": "unlabelled",
            "COMPLETENESS_MAX_DIM": 3,
        }
    )
    @patch("toristack.management.commands.toristack.run_command", wraps=run_command)
    def test_defaults_come_from_settings(self, mock_run):
        self.run_toristack("groups", "wp112")
        kwargs = mock_run.call_args.kwargs
        self.assertEqual(kwargs["jobs"], 3)
        self.assertEqual(kwargs["max_rays"], 12)
        self.assertEqual(kwargs["convention"], "unlabelled")

        self.run_toristack("groups", "wp112", "--jobs", "2")
        self.assertEqual(mock_run.call_args.kwargs["jobs"], 2)
