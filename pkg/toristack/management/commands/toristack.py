import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from toristack.exceptions import InputError, ToristackError, ValidationFailed
from toristack.inputs import bundled_names, load_bundled
from toristack.momentred import LevelConvention
from toristack.reports import parse_input, render_json, render_text, run_command
from toristack.serializers import COMMANDS

logger = logging.getLogger(__name__)

# Exit statuses: 0 pass, 1 failed check, 2 bad input.
CHECK_FAILED = 1
INPUT_ERROR = 2


class Command(BaseCommand):
    help = (
        "Run a stage of the labelled polytope to toric DM stack pipeline on "
        "an input document (a path or a bundled name such as wp112)."
    )

    def add_arguments(self, parser):
        parser.add_argument("subcommand", choices=COMMANDS)
        parser.add_argument("input", help="Input file or bundled input name.")
        parser.add_argument(
            "--json",
            action="store_true",
            help="Emit the canonical machine-readable report.",
        )
        parser.add_argument(
            "--jobs",
            type=int,
            default=None,
            help="Worker threads for the pattern sweep of certify.",
        )
        parser.add_argument(
            "--fan-complete-assert",
            action="store_true",
            dest="fan_complete_assert",
            help="Assert completeness of fans too large to check.",
        )
        parser.add_argument(
            "--level-convention",
            choices=[convention.value for convention in LevelConvention],
            default=None,
            help="How the level is formed from support numbers and labels.",
        )

    def read_input(self, name: str) -> str:
        path = Path(name)
        if path.is_file():
            try:
                return path.read_text(encoding="utf-8")
            except UnicodeDecodeError as exc:
                raise InputError(f"{name} is not UTF-8 text.") from exc
        text = load_bundled(name)
        if text is None:
            raise InputError(
                f"No such file or bundled input: {name}. Bundled inputs: "
                f"{', '.join(bundled_names())}, conehead_<k>."
            )
        return text

    def handle(self, *args, **options):
        config = settings.TORISTACK
        jobs = config["JOBS"] if options["jobs"] is None else options["jobs"]
        if jobs < 1:
            raise CommandError("--jobs must be positive.", returncode=INPUT_ERROR)

        try:
            document = parse_input(self.read_input(options["input"]))
            report = run_command(
                options["subcommand"],
                document,
                jobs=jobs,
                convention=options["level_convention"]
                or config["LEVEL_CONVENTION"],
                assume_complete=options["fan_complete_assert"],
                max_rays=config["MAX_RAYS"],
                completeness_max_dim=config["COMPLETENESS_MAX_DIM"],
            )
        except ValidationFailed as error:
            raise CommandError(
                f"[{error.code}] {error.detail}", returncode=CHECK_FAILED
            ) from error
        except ToristackError as error:
            raise CommandError(
                f"[{error.code}] {error.detail}", returncode=INPUT_ERROR
            ) from error

        if options["json"]:
            self.stdout.write(render_json(report), ending="")
        else:
            self.stdout.write(render_text(report), ending="")

        if not report.passed:
            logger.warning("%s failed on %s", report.command, options["input"])
            raise CommandError(
                f"{report.command} checks failed.", returncode=CHECK_FAILED
            )
