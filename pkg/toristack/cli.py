"""The ``toristack`` console script: ``manage.py toristack`` without manage.py."""

import os
import sys


def main(argv: list[str] | None = None):
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings")
    from django.core.management import execute_from_command_line

    arguments = sys.argv[1:] if argv is None else argv
    execute_from_command_line(["toristack", "toristack", *arguments])


if __name__ == "__main__":
    main()
