# -*- coding: utf-8 -*-

import sys

from django.core.management.base import BaseCommand
from django.core.management.base import CommandError

from .exceptions import EXIT_DATA
from .exceptions import EXIT_INTERNAL
from .exceptions import EXIT_USAGE
from .exceptions import RoadawareError
from .logs import Logs


class RoadawareCommand(BaseCommand):
    """A management command reporting failures with the pipeline's exit codes:
    1 for usage errors, 2 for data errors and 3 for internal errors.

    Subclasses implement `run(**options)` instead of `handle`.
    """

    requires_system_checks = []
    logs_name = "cli"

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)

        def error(message):
            if getattr(parser, "called_from_command_line", False):
                parser.print_usage(sys.stderr)
                sys.stderr.write("%s: error: %s\n" % (parser.prog, message))
                sys.exit(EXIT_USAGE)
            raise CommandError("Error: %s" % message, returncode=EXIT_USAGE)

        parser.error = error
        return parser

    def handle(self, *args, **options):
        logs = Logs(name=self.logs_name)
        try:
            return self.run(**options)
        except CommandError:
            raise
        except RoadawareError as error:
            logs.error("%s failed: %s" % (self.logs_name, error))
            raise CommandError(str(error), returncode=error.exit_code)
        except OSError as error:
            logs.error("%s failed: %s" % (self.logs_name, error))
            raise CommandError(str(error), returncode=EXIT_DATA)
        except Exception as error:
            logs.catch()
            raise CommandError("Internal error: %s" % error,
                               returncode=EXIT_INTERNAL)

    def run(self, **options):
        raise NotImplementedError("subclasses must implement run()")
