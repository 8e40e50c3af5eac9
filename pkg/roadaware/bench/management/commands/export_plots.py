# -*- coding: utf-8 -*-

import os

from roadaware.base.commands import RoadawareCommand
from roadaware.bench.plots import emit_plot_data
from roadaware.bench.plots import load_run


class Command(RoadawareCommand):
    help = "Write the CSV series of a benchmark run record"
    logs_name = "export-plots"

    def add_arguments(self, parser):
        parser.add_argument("--run", dest="run", required=True,
                            help="run.json file or the directory holding it")
        parser.add_argument("--out", dest="out", default=None,
                            help="Output directory (default: next to the run record)")

    def run(self, **options):
        data = load_run(options["run"])
        out = options["out"]
        if out is None:
            out = options["run"] if os.path.isdir(options["run"]) \
                else os.path.dirname(os.path.abspath(options["run"]))
        for path in emit_plot_data(data, out):
            self.stdout.write(path)
